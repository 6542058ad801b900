"""Unit tests for the fcilab library."""
