# Validation package initialization.
"""Statistical checks used by the test-suite and the validate command."""
