"""Core utilities: configuration, logging, errors, version."""
