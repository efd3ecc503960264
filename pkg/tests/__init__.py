"""Tests for the abflux package."""
