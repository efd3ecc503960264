"""Integration tests for abflux."""
