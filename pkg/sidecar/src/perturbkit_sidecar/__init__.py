"""Model sidecar for the perturbkit wire protocol."""

__version__ = "0.1.0"
