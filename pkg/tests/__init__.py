"""Test suite for pegcluster."""
