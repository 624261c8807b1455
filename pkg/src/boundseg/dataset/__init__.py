"""Dataset I/O and the synthetic corpus generator."""
