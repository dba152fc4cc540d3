# Core data model package initialization.
"""Value types and pydantic contracts shared by the samplers and services."""
