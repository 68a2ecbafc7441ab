"""Courseforge: zero-code interactive courseware authoring and editing."""

__version__ = "0.1.0"
