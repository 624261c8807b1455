"""Boundary output patterns, reconstruction and SFT target synthesis."""
