"""archive-lens: harvest, normalize and visually explore archive metadata."""

__version__ = "0.1.0"
