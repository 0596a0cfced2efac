"""Bundled reference tables and the synthetic name corpus."""
