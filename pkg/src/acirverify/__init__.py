"""Formal verification of ACIR-style arithmetic circuits via SMT."""
