"""Core document, label, span and segmentation types."""
