"""Candidate-generation policies. One module per policy."""
