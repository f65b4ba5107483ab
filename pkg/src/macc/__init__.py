"""Component & connector architecture toolchain."""

__version__ = "0.1.0"
