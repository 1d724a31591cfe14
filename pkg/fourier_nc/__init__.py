"""Fourier-NC: network coordination over finite groups via sparse Fourier spectra"""

__version__ = "1.0.0"
