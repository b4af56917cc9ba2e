"""
Sampling of discrete solutions along axis-aligned segments.
"""

import re
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd

from core.errors import InvalidArgumentError, OutOfDomainError
from fem.solver import DOMAIN_TOL, DiscreteSolution

AXES = ("x", "y")


@dataclass(frozen=True)
class LineSegment:
    start: Tuple[float, ...]
    end: Tuple[float, ...]

    def __post_init__(self):
        start = np.asarray(self.start, dtype=float)
        end = np.asarray(self.end, dtype=float)
        if start.shape != end.shape or start.ndim != 1 or start.size not in (1, 2):
            raise InvalidArgumentError(f"Segment endpoints must share dimension 1 or 2: {self.start}, {self.end}")
        if not (np.all(np.isfinite(start)) and np.all(np.isfinite(end))):
            raise InvalidArgumentError("Segment endpoints must be finite")
        if np.count_nonzero(start != end) > 1:
            raise InvalidArgumentError(f"Segment {self.start} -> {self.end} is not axis-aligned")
        both = np.concatenate([start, end])
        if np.any(both < -DOMAIN_TOL) or np.any(both > 1.0 + DOMAIN_TOL):
            raise InvalidArgumentError(f"Segment {self.start} -> {self.end} leaves the unit domain")

    @property
    def dim(self) -> int:
        return len(self.start)

    @classmethod
    def parse(cls, text: str, dim: int = 2) -> "LineSegment":
        """
        Parse 'x=<v>' (vertical line at x=v) or 'y=<v>' (horizontal line at y=v).

        In 1D the only line is the whole interval; 'x' or 'all' selects it.
        """
        text = text.strip()
        if dim == 1:
            if text not in ("x", "all"):
                raise InvalidArgumentError(f"1D problems only support the line 'x', got {text!r}")
            return cls(start=(0.0,), end=(1.0,))
        match = re.fullmatch(r"([xy])\s*=\s*([-+0-9.eE]+)", text)
        if not match:
            raise InvalidArgumentError(f"Line must look like 'x=<value>' or 'y=<value>', got {text!r}")
        axis, raw = match.groups()
        try:
            value = float(raw)
        except ValueError:
            raise InvalidArgumentError(f"Invalid line coordinate {raw!r}") from None
        if axis == "x":
            return cls(start=(value, 0.0), end=(value, 1.0))
        return cls(start=(0.0, value), end=(1.0, value))


def extract_line(solution: DiscreteSolution, line: LineSegment, samples: int) -> pd.DataFrame:
    """Uniform, endpoint-inclusive samples of the solution along the segment."""
    if samples < 2:
        raise InvalidArgumentError(f"Need at least 2 samples, got {samples}")
    if line.dim != solution.space.dim:
        raise InvalidArgumentError(f"{line.dim}D segment for a {solution.space.dim}D solution")
    t = np.linspace(0.0, 1.0, samples)
    start = np.asarray(line.start, dtype=float)
    end = np.asarray(line.end, dtype=float)
    points = start[None, :] + t[:, None] * (end - start)[None, :]
    points[-1] = end
    try:
        values = solution.evaluate_many(points)
    except OutOfDomainError as e:
        raise InvalidArgumentError(str(e)) from e
    frame = pd.DataFrame({AXES[d]: points[:, d] for d in range(line.dim)})
    frame["value"] = values
    return frame
