"""Routers for the analysis and simulation endpoints."""
