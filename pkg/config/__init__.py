"""Project configuration: environment loader and bundled scenarios"""
