"""Per-run trajectory records and their CSV form."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class RunTrace:
    algorithm: str
    records: list = field(default_factory=list)  # dicts keyed t, error, and
                                                 # nu_hat/zeta/warn or correlation
    final_error: float = math.nan
    final_iterate: object = None
    wall_time: float = 0.0
    seeds: list = field(default_factory=list)


def _cell(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, bool):
        return "1" if v else "0"
    return format(float(v), ".17g")


def write_trajectory_csv(records, path) -> None:
    """Write a trajectory CSV.  Power-iteration records (no nu_hat) use the
    schema t,error,correlation; refinement-style records use
    t,error,nu_hat,zeta,warn.  Missing errors become the "nan" sentinel."""
    refine_style = any("nu_hat" in r for r in records)
    path = Path(path)
    with open(path, "w") as fh:
        if refine_style:
            fh.write("t,error,nu_hat,zeta,warn\n")
            for r in records:
                fh.write(",".join([str(r["t"]), _cell(r.get("error")),
                                   _cell(r.get("nu_hat")), _cell(r.get("zeta")),
                                   _cell(r.get("warn", False))]) + "\n")
        else:
            fh.write("t,error,correlation\n")
            for r in records:
                fh.write(",".join([str(r["t"]), _cell(r.get("error")),
                                   _cell(r.get("correlation"))]) + "\n")
