"""Offline figure generation for fluxlab experiment outputs."""
