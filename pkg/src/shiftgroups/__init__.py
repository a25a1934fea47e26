"""Topological full groups of shifts of finite type, computed exactly."""

__version__ = "0.1.0"
