"""Parameterised examination papers.

Question families are templates over ten digit parameters taken from each
student's year of entry, ID and examination code.  The package checks that
every family is well posed at every parameter point, lays the paper out as
a protected spreadsheet, and marks submissions against the answer key.
"""
__version__ = "0.1.0"
