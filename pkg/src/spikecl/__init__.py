"""Spiking recurrent networks for time-series classification with curriculum ordering."""

__version__ = "0.1.0"
