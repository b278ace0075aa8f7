"""Euclidean and spherical entropy, Nash and penalized functionals."""
