"""Test suite for the aperiodic-spectra package."""
