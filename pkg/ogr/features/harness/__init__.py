"""
Experiment Harness Feature Package
"""
