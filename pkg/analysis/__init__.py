# analysis/__init__.py - Error norms and convergence studies
