"""
Test package for turbine-inspect.

This package contains unit tests, integration tests, and test utilities
for validating the functionality of the turbine-inspect application.
"""