# Linear algebra package initialization.
"""Dense and diagonal linear algebra kernels."""
