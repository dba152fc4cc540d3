# Integration tests module
