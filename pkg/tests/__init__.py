"""
Tests for pbsift
"""
