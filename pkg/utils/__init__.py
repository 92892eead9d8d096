# utils/__init__.py - Configuration parsing, output writers and errors
