"""HTTP service wrapping the estimators and the analysis harness."""
