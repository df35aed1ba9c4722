"""HTTP service for score tests, FDR selection and simulation studies."""
