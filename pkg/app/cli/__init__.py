"""Command-line interface: moment, verify, limits, schema."""
