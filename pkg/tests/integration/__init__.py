"""
Integration tests for ceprecode.
"""
