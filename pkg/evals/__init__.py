"""Acceptance evaluation for the box-space pipeline."""
