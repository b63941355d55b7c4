"""netrevive: predict and verify single-node revival of networked bistable
dynamical systems.

The package reduces a network to a chain of shortest-path shells around the
controlled node, solves the reduced model to predict whether clamping can
drive the system from the dead state to the active one, and checks the
prediction with full-network Monte Carlo integration.
"""
__version__ = "0.1.0"
