"""
Benchmark Problems Feature Package
"""
