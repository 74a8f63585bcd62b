"""Statevector simulation of re-uploading circuits, binned information-plane
probes, and compression-gnostic training feedback."""

from qiplane._core import *  # noqa: F401,F403
from qiplane._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
