"""
Optimizer Feature Package
"""
