"""Integration tests package for component interactions."""