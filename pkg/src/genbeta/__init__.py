"""Generalized beta distributions, their stochastic processes and fits to realized volatility."""
