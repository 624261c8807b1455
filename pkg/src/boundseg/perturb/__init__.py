"""Intermediate-candidate construction by single-edit perturbation."""
