"""Half-wave Dirac-Klein-Gordon simulator and estimate laboratory."""

__version__ = "0.1.0"
