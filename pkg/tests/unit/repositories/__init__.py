"""Unit tests for repository layer."""
