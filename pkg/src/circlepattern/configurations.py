"""Configuration containers for solved circle patterns."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np


@dataclass
class CurvatureReport:
    """Per-vertex cone angles / apex curvatures and the iteration trace."""

    sigma: Dict[int, float]
    curvature: Dict[int, float]
    max_abs_K: float
    iterations: int
    residual_trace: List[float] = field(default_factory=list)
    angle_residual: Optional[float] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "sigma": {str(k): v for k, v in self.sigma.items()},
            "curvature": {str(k): v for k, v in self.curvature.items()},
            "max_abs_K": self.max_abs_K,
            "iterations": self.iterations,
            "residual_trace": list(self.residual_trace),
            "angle_residual": self.angle_residual,
            "notes": list(self.notes),
        }


@dataclass
class EuclideanConfiguration:
    """Planar centers and radii, one disk per vertex, with the face hosting
    infinity removed from the layout."""

    centers: np.ndarray            # complex, shape (n,)
    radii: np.ndarray              # float, shape (n,)
    marked_face: Optional[Tuple[int, int, int]]
    normalized: Dict[str, bool] = field(default_factory=dict)

    @property
    def vertex_count(self) -> int:
        return len(self.radii)


@dataclass
class SphericalConfiguration:
    """Unit-sphere cap centers (unit 3-vectors) and arc radii in (0, pi)."""

    centers: np.ndarray            # float, shape (n, 3)
    radii: np.ndarray              # float, shape (n,)
    marked_face: Optional[Tuple[int, int, int]]
    normalized: Dict[str, bool] = field(default_factory=dict)

    @property
    def vertex_count(self) -> int:
        return len(self.radii)
