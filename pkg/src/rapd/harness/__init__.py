"""Operational surface: metrics, config parsing, benchmark suites, CLI."""
