"""Boundseg: boundary-generation structured text segmentation."""

__version__ = "0.1.0"
