"""
Test suite for ceprecode.
"""
