"""Unit tests package for individual components."""