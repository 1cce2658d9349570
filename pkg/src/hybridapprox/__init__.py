"""Walsh x Korobov hybrid-space approximation: kernels, point sets, spectra, tractability."""

__version__ = "0.1.0"
