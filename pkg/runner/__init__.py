"""Command-line orchestration and report emission."""
