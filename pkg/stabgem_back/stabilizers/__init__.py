"""Stabilizer-code entanglement auditing: algebra, codes, strings and certificates."""
