"""On-disk result cache."""
