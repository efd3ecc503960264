"""Unit tests for abflux."""
