"""
Online gradient regression optimizer app.
"""
