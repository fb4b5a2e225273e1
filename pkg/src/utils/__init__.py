"""
Utility modules for the Entropic Chaos Degree toolkit
"""
