"""Numerical core: bodies, band-limited functions, sampling sets, LP"""
