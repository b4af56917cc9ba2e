"""
Summary statistics and artifact writers.

CSV files are comma-separated with a header row, LF line endings and
17 significant digits; JSON files are UTF-8 with sorted keys.
"""

import json
import logging
import math
from pathlib import Path
from typing import Dict

import numpy as np
import pandas as pd

from core.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def _clean(value):
    """JSON-safe scalars: numpy types to Python, NaN/inf to None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("Wrote %s (%d rows)", path, len(frame))
    return path


def write_json(payload: Dict, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(_clean(payload), f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")
    logger.info("Wrote %s", path)
    return path


def summarize_sweep(frame: pd.DataFrame) -> pd.DataFrame:
    """
    Aggregate an E(tau) sweep per (problem, n, r).

    Columns: points, mean_e_theory and, when present, mean_e_ann,
    ann_win_rate (share of points with E(tau_ann) <= E(tau_theory)),
    mean_ratio_ann (mean E(tau_ann) / E(tau_theory)), mean_e_star.
    """
    ok = frame
    if "error" in frame:
        ok = frame[frame["error"].fillna("") == ""]
    rows = []
    for (problem_id, n, r), group in ok.groupby(["problem_id", "n", "r"], sort=True):
        row = {"problem_id": problem_id, "n": int(n), "r": int(r), "points": int(len(group)),
               "mean_e_theory": float(group["e_theory"].mean())}
        if "e_ann" in group:
            row["mean_e_ann"] = float(group["e_ann"].mean())
            row["ann_win_rate"] = float((group["e_ann"] <= group["e_theory"]).mean())
            row["mean_ratio_ann"] = float((group["e_ann"] / group["e_theory"]).mean())
        if "e_star" in group:
            row["mean_e_star"] = float(group["e_star"].mean())
        rows.append(row)
    return pd.DataFrame(rows)


def summarize_norms(frame: pd.DataFrame) -> pd.DataFrame:
    """Mean nodal, L2 and H1 errors per (problem, r, tau mode)."""
    summary = (frame.groupby(["problem_id", "r", "tau_mode"], sort=True)[["e_nodal", "l2", "h1"]]
               .mean()
               .reset_index())
    summary.insert(3, "cases", frame.groupby(["problem_id", "r", "tau_mode"], sort=True).size().to_numpy())
    return summary


def generate_summary_stats(frame: pd.DataFrame) -> pd.DataFrame:
    """
    Generate summary statistics from evaluation rows.

    Args:
        frame: sweep rows (with e_theory) or norm rows (with tau_mode)

    Returns:
        Aggregated table
    """
    if "e_theory" in frame:
        return summarize_sweep(frame)
    if "tau_mode" in frame:
        return summarize_norms(frame)
    raise InvalidArgumentError("Frame holds neither sweep nor norm rows")
