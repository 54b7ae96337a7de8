"""Initial data families, one module per family."""
