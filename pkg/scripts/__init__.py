"""
Acceptance and reporting scripts
"""
