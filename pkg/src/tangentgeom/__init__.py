"""Tangent-category constructions on R^n: jets, connections, geometric spaces."""
