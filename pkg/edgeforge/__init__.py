__app_name__ = "edgeforge"
__version__ = "1.0.0"
