# Sampler package initialization.
"""Gaussian, hyperplane-truncated, structured and SG-MCMC samplers."""
