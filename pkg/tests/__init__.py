"""
Test suite for PACS Dog Map
"""