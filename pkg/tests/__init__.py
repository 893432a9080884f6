"""Tests for qexgan."""
