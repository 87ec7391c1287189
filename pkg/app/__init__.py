"""Characteristic-polynomial derivative moments toolkit."""
