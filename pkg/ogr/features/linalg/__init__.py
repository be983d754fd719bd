"""
Dense Linear Algebra Feature Package
"""
