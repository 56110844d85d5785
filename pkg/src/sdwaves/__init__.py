"""Traveling-wave profiles for surface diffusion of plane curves with contact angles."""

__version__ = "0.1.0"
