"""
Property-based tests for ceprecode.
"""
