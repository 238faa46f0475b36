"""
Writers and readers for audit reports, per-item CSV tables, training logs and
weight files. JSON output is sorted-key, 2-space indented and byte-stable.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List, Type, TypeVar, Union

import pandas as pd
from pydantic import BaseModel, ValidationError

from schemas.config import ProfileReport
from schemas.documents import WeightFile
from schemas.gridworld import TrainLog
from schemas.meanings import describe
from schemas.profile import GroundingProfile
from semantics.errors import ConfigError
from utils.logger import logger

PathLike = Union[str, Path]
M = TypeVar("M", bound=BaseModel)

REPORT_FILE = "profile_report.json"
WEIGHTS_FILE = "weights.json"
TRAIN_LOG_FILE = "train_log.csv"


def to_json(model: BaseModel) -> str:
    """Canonical JSON text; +inf is written as Infinity."""
    payload = json.loads(model.model_dump_json())
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(model: BaseModel, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(model), encoding="utf-8")
    return path


def read_json(model_type: Type[M], path: PathLike) -> M:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"file not found: {path}")
    try:
        return model_type.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise ConfigError(f"invalid {model_type.__name__} document {path}: {e}") from e


# reports

def write_report(report: ProfileReport, path: PathLike) -> Path:
    path = write_json(report, path)
    logger.info(f"[ReportOutput] report written to {path}")
    return path


def read_report(path: PathLike) -> ProfileReport:
    return read_json(ProfileReport, path)


def profile_tables(profile: GroundingProfile) -> Dict[str, pd.DataFrame]:
    """One frame per estimator table, plus the robustness curves in long form."""
    t = profile.tables
    frames = {
        "preservation": pd.DataFrame([
            {"item": r.item, "realized": describe(r.realized), "target": describe(r.target), "distance": r.distance}
            for r in t.preservation
        ]),
        "faithfulness": pd.DataFrame([
            {"item": r.item, "realized": describe(r.realized), "target": describe(r.target), "distance": r.distance}
            for r in t.faithfulness
        ]),
        "ace": pd.DataFrame([
            {
                "item": r.item,
                "on": describe(r.on_meaning),
                "off": describe(r.off_meaning),
                "gold": describe(r.gold),
                "on_distance": r.on_distance,
                "off_distance": r.off_distance,
                "success_on": r.success_on,
                "success_off": r.success_off,
            }
            for r in t.ace
        ]),
        "composition": pd.DataFrame([
            {"item": r.item, "actual": describe(r.actual), "combined": describe(r.combined), "distance": r.distance}
            for r in t.composition
        ]),
        "systematicity": pd.DataFrame([
            {
                "item": r.item,
                "realized": describe(r.realized),
                "gold": describe(r.gold),
                "distance": r.distance,
                "within_tolerance": r.within_tolerance,
            }
            for r in t.systematicity
        ]),
    }
    curve_rows: List[dict] = []
    for label, curve in sorted(profile.curves.items()):
        for scale, value, raw in zip(curve.scales, curve.values, curve.raw_values):
            curve_rows.append({"label": label, "scale": scale, "value": value, "raw_value": raw})
    frames["robustness"] = pd.DataFrame(curve_rows, columns=["label", "scale", "value", "raw_value"])
    return frames


def write_tables(profile: GroundingProfile, out_dir: PathLike) -> List[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, frame in profile_tables(profile).items():
        path = out_dir / f"{name}.csv"
        frame.to_csv(path, index=False)
        written.append(path)
    logger.info(f"[ReportOutput] {len(written)} tables written to {out_dir}")
    return written


# training artefacts

def write_train_log(log: TrainLog, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame([r.model_dump() for r in log.rows], columns=["episode", "loss"]).to_csv(path, index=False)
    return path


def read_train_log(path: PathLike) -> TrainLog:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"training log not found: {path}")
    frame = pd.read_csv(path)
    return TrainLog(rows=[{"episode": int(e), "loss": float(l)} for e, l in zip(frame["episode"], frame["loss"])])


def write_weights(weights: WeightFile, path: PathLike) -> Path:
    path = write_json(weights, path)
    logger.info(f"[ReportOutput] weights written to {path}")
    return path


def read_weights(path: PathLike) -> WeightFile:
    return read_json(WeightFile, path)
