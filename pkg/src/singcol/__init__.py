"""Collisions of plane curve singularities: invariants, closed-form rules and flat-limit verification."""

__version__ = "0.1.0"
