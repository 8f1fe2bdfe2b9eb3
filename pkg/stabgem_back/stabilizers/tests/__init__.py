"""Tests package for stabilizers app."""
