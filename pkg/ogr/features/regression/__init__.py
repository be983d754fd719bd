"""
Gradient Regression Feature Package
"""
