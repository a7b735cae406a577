"""
Test package for Composite Membrane.
"""
