# Service layer package initialization.
"""Services that run benchmark sweeps, validation and SG-MCMC curves."""
