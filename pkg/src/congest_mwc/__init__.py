"""Distributed minimum-weight-cycle approximation in a simulated CONGEST network."""
