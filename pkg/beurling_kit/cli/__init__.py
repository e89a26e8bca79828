"""Command-line front end: scenario files, the worker-pool runner and report output"""
