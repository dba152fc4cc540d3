# Core package initialization module.
"""Top-level package for the Gaussian sampling core."""
