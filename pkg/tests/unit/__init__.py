"""Unit tests for aperiodic-spectra."""
