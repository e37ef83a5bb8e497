"""Packaged demonstration scenarios (data files, loaded by name)."""
