"""Theorem engine: checks, extremal search, counterexample and reports"""
