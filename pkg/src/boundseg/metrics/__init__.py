"""Segmentation metrics and the verifiable reward."""
