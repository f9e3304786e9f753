"""Numerical workbench for the elliptic face algebra U_{x,r}(sl_2^) and its
free-field, vertex-operator and trigonometric-limit structures."""
from . import (
    current_structure,
    face_rmatrix,
    free_field,
    scaling_limit,
    special_functions,
    twist,
    vertex_ops,
)
from .config import DEFAULT_CFG, ModelParams, TruncationConfig
from .errors import *  # noqa: F401,F403

__version__ = "0.1.0"

__all__ = [
    "current_structure",
    "face_rmatrix",
    "free_field",
    "scaling_limit",
    "special_functions",
    "twist",
    "vertex_ops",
    "DEFAULT_CFG",
    "ModelParams",
    "TruncationConfig",
]
