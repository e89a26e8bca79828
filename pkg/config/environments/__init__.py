"""Environment loading"""
