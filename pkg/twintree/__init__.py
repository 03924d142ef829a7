__version__ = "1.0.0"
__prog__ = "twintree"
