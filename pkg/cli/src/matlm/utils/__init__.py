"""Utility helpers shared across the matlm package."""

from .file import read_text_lines, save_json_report, write_text_lines  # noqa: F401

__all__ = [
    "read_text_lines",
    "save_json_report",
    "write_text_lines",
]
