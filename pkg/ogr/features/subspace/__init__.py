"""
Subspace Tracking Feature Package
"""
