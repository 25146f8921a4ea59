"""Source reconstruction for a 1-D time-fractional diffusion equation from noisy final-time samples."""

__version__ = "0.1.0"
