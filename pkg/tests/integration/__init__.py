"""Integration tests for the fcilab library and the fci command."""
