"""Thermal Bogoliubov symmetry of the damped harmonic oscillator in Liouville space."""

__version__ = "0.1.0"
