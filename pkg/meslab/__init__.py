"""Exact mutually unbiased bases, line-state geometry and Mean King protocols for odd prime d."""

from meslab.config import TOOL_VERSION

__version__ = TOOL_VERSION
