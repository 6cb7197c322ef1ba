"""Holomorphic gerbes on complex tori: exact symmetry and obstruction computations."""
