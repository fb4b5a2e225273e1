"""
Entropic Chaos Degree toolkit
"""

__version__ = "1.0.0"
__author__ = "Dynamics Tooling Team"
