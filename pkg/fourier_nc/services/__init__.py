"""Stateless services behind the Fourier-NC commands"""
