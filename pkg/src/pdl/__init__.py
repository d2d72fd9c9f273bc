"""Prime-discriminant class numbers and L(1) statistics toolkit."""

__version__ = "0.1.0"
