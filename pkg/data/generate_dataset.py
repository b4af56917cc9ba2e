"""
Generate the (r, h, Pe_g) -> tau* training dataset.

Each sample draws a degree and a mesh size from their sets and a global
Péclet number from a range, then runs the tau optimizer on the training
problem. Samples are seeded independently (seed XOR index), so the
dataset is reproducible whatever the number of workers.
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from core.errors import ArtifactNotFoundError, InvalidArgumentError, SupgError
from core.settings import VERSION, OptimizerSettings
from fem import build_mesh, divisions_for_size
from problems import ProblemCatalog
from stabilization import mu_from_peclet

logger = logging.getLogger(__name__)

DEFAULT_R_SET = (1, 2, 3)
DEFAULT_H_SET = (math.sqrt(2) / 10, math.sqrt(2) / 20, math.sqrt(2) / 40)
DEFAULT_PE_RANGE = (7.0, 70710.0)
SAMPLING_MODES = ("log-uniform", "uniform")
FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True)
class TauRecord:
    r: int
    h: float
    pe_g: float
    mu: float
    tau_star: float
    e_at_star: float
    seed: int
    theta: Optional[float] = None

    @classmethod
    def columns(cls) -> Tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


def records_to_frame(records: Sequence[TauRecord]) -> pd.DataFrame:
    frame = pd.DataFrame([asdict(rec) for rec in records], columns=list(TauRecord.columns()))
    return frame.astype({"r": int, "seed": int})


def draw_peclet(rng: np.random.Generator, pe_range: Tuple[float, float], sampling: str) -> float:
    lo, hi = pe_range
    if sampling == "log-uniform":
        return float(10.0 ** rng.uniform(math.log10(lo), math.log10(hi)))
    return float(rng.uniform(lo, hi))


def optimize_record(r: int, h: float, pe_g: float, seed: int = 0,
                    problem_id: str = "train2d", theta: Optional[float] = None,
                    optimizer: OptimizerSettings = OptimizerSettings()) -> TauRecord:
    """Run the tau optimization for one feature triple (L = 1)."""
    from pipeline.tau_search import find_optimal_tau

    beta_norm = ProblemCatalog.beta_norm(problem_id)
    mu = mu_from_peclet(beta_norm, 1.0, pe_g)
    problem = ProblemCatalog.build(problem_id, mu, theta=theta)
    mesh = build_mesh(problem.dim, divisions_for_size(problem.dim, h))
    result = find_optimal_tau(problem, mesh, r, optimizer.bracket, optimizer.tol, optimizer.budget)
    return TauRecord(r=int(r), h=float(h), pe_g=float(pe_g), mu=mu, tau_star=result.tau_star,
                     e_at_star=result.e_at_star, seed=int(seed), theta=theta)


def generate_dataset(m: int, r_set: Sequence[int] = DEFAULT_R_SET,
                     h_set: Sequence[float] = DEFAULT_H_SET,
                     pe_range: Tuple[float, float] = DEFAULT_PE_RANGE,
                     sampling: str = "log-uniform", seed: int = 0,
                     problem_id: str = "train2d",
                     optimizer: OptimizerSettings = OptimizerSettings(),
                     workers: int = 1, show_progress: bool = True) -> pd.DataFrame:
    """
    Generate m samples of optimal tau.

    Args:
        m: number of samples to draw
        r_set, h_set: sets the degree and the mesh size are drawn from
        pe_range: closed range of the global Péclet number
        sampling: "log-uniform" or "uniform" over pe_range
        seed: base seed; sample i uses seed ^ i
        workers: parallel optimizations

    Returns:
        Frame of TauRecord rows in sample order; samples whose
        optimization failed are dropped (and logged).
    """
    if m < 1:
        raise InvalidArgumentError(f"m must be >= 1, got {m}")
    if seed < 0:
        raise InvalidArgumentError(f"seed must be non-negative, got {seed}")
    if sampling not in SAMPLING_MODES:
        raise InvalidArgumentError(f"Unknown sampling {sampling!r} (choose from {', '.join(SAMPLING_MODES)})")
    if not r_set or not h_set:
        raise InvalidArgumentError("r_set and h_set must be nonempty")
    lo, hi = pe_range
    if not 0.0 < lo <= hi:
        raise InvalidArgumentError(f"Invalid Péclet range {pe_range}")

    def sample(index: int) -> Tuple[int, Optional[TauRecord]]:
        sample_seed = seed ^ index
        rng = np.random.default_rng(sample_seed)
        r = int(rng.choice(np.asarray(r_set)))
        h = float(rng.choice(np.asarray(h_set, dtype=float)))
        pe_g = draw_peclet(rng, pe_range, sampling)
        try:
            return index, optimize_record(r, h, pe_g, sample_seed, problem_id, optimizer=optimizer)
        except SupgError as e:
            logger.warning("Dropping sample %d (r=%d, h=%.6g, pe_g=%.6g): %s", index, r, h, pe_g, e)
            return index, None

    results: Dict[int, Optional[TauRecord]] = {}
    with tqdm(total=m, desc="Generating dataset", disable=not show_progress) as pbar:
        if workers <= 1:
            for i in range(m):
                index, record = sample(i)
                results[index] = record
                pbar.update(1)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                for index, record in pool.map(sample, range(m)):
                    results[index] = record
                    pbar.update(1)

    records = [results[i] for i in range(m) if results[i] is not None]
    if len(records) < m:
        logger.warning("Dropped %d of %d samples", m - len(records), m)
    return records_to_frame(records)


def metadata_path(path: Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def save_dataset(records: pd.DataFrame, path: Path, metadata: Optional[Dict] = None) -> Path:
    """Write the dataset CSV and its JSON metadata sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    records.loc[:, list(TauRecord.columns())].to_csv(
        path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    meta = {"version": VERSION, "n_records": int(len(records))}
    meta.update(metadata or {})
    with open(metadata_path(path), "w", encoding="utf-8", newline="\n") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info("Dataset saved to %s with %d records", path, len(records))
    return path


def load_dataset(path: Path) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise ArtifactNotFoundError(path, producer="python main.py generate")
    frame = pd.read_csv(path)
    missing = [c for c in TauRecord.columns() if c not in frame.columns]
    if missing:
        raise InvalidArgumentError(f"{path} lacks dataset columns {missing}")
    return frame.astype({"r": int, "seed": int})


def load_metadata(path: Path) -> Dict:
    meta = metadata_path(path)
    if not meta.exists():
        return {}
    with open(meta, encoding="utf-8") as f:
        return json.load(f)


def split(records: pd.DataFrame, fraction: float = 0.8, seed: int = 0) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """Seeded shuffle, then the first round(fraction * n) rows train and the rest validate."""
    if not 0.0 < fraction < 1.0:
        raise InvalidArgumentError(f"fraction must lie in (0, 1), got {fraction}")
    n = len(records)
    if n < 2:
        raise InvalidArgumentError(f"Need at least 2 records to split, got {n}")
    n_train = min(max(int(round(fraction * n)), 1), n - 1)
    order = np.random.default_rng(seed).permutation(n)
    training = records.iloc[order[:n_train]].reset_index(drop=True)
    validation = records.iloc[order[n_train:]].reset_index(drop=True)
    return training, validation
