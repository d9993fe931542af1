"""
Unit tests for ceprecode.
"""
