"""Tests for agu."""
