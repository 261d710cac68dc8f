import json
import math
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from exchange_kinetics.distribution.pmf import WealthPMF
from exchange_kinetics.logger import FLOAT_FORMAT

PMF_COLUMNS = ["n", "p"]


def pmf_frame(pmf: WealthPMF) -> pd.DataFrame:
    return pd.DataFrame({"n": pmf.support, "p": pmf.values})


def write_pmf_csv(pmf: WealthPMF, path: str | Path) -> Path:
    """Header `n,p`, one row per wealth value in ascending order."""
    path = Path(path)
    pmf_frame(pmf).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_pmf_csv(path: str | Path) -> WealthPMF:
    frame = pd.read_csv(path, float_precision="round_trip")
    if list(frame.columns) != PMF_COLUMNS:
        raise ValueError(f"{path}: expected columns {PMF_COLUMNS}, got {list(frame.columns)}")
    n = frame["n"].to_numpy(np.int64)
    if len(n) > 1 and np.any(np.diff(n) <= 0):
        raise ValueError(f"{path}: wealth values must be strictly ascending")
    return WealthPMF.from_mapping(dict(zip(n.tolist(), frame["p"].tolist())))


def write_trajectory_csv(frame: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def pmf_event_filename(event: int) -> str:
    return f"pmf_{event}.csv"


def pmf_time_filename(t: float) -> str:
    return f"pmf_t{t:g}.csv"


def _to_builtin(value: Any) -> Any:
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (Path, tuple)):
        return str(value) if isinstance(value, Path) else list(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _finite(value: Any) -> Any:
    """NaN and infinities become null, which every JSON reader accepts."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def to_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, repr-exact floats."""
    return json.dumps(_finite(obj), indent=2, sort_keys=True, default=_to_builtin) + "\n"


def write_json(obj: Any, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(to_json(obj))
    return path
