"""Method registry and JSON persistence for fitted correction models.

Every model type exposes ``correct(series)`` and ``to_dict()``; this module
maps method names to fitting functions and handles files on disk. A hybrid
model is stored as a small manifest pointing at two stage files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .core import DEFAULT_CLASSES, WET_THRESHOLD, PairedSeries
from .features import DEFAULT_CAP
from .gpr import GprModel, gpr_fit
from .hybrid import HybridModel, hybrid_fit
from .loci import LociModel, loci_fit
from .qm import QmModel, qm_fit
from .svr import SvrModel, svr_fit

METHODS = ("LOCI", "QM", "GPR", "SVR", "LOCI-GPR", "QM-GPR")

_KINDS = {"loci": LociModel, "qm": QmModel, "gpr": GprModel, "svr": SvrModel}


class ModelFileError(ValueError):
    pass


def normalize_method(name: str) -> str:
    m = name.strip().upper().replace("_", "-")
    if m not in METHODS:
        raise ValueError(f"unknown method {name!r}; expected one of {', '.join(METHODS)}")
    return m


def derive_seed(master: int, *parts: str) -> int:
    """Stable 63-bit seed from the master seed and a work-unit key.

    Uses a cryptographic digest rather than :func:`hash` so that seeds do not
    depend on interpreter hash randomisation or on worker scheduling.
    """
    key = "\x1f".join([str(int(master)), *map(str, parts)]).encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "little") >> 1


def fit_method(pair: PairedSeries, method: str, *, threshold: float = WET_THRESHOLD,
               classes=DEFAULT_CLASSES, seed: int = 0, cap: int = DEFAULT_CAP):
    method = normalize_method(method)
    if method == "LOCI":
        return loci_fit(pair, threshold)
    if method == "QM":
        return qm_fit(pair, threshold)
    if method == "GPR":
        return gpr_fit(pair, classes, seed=seed, cap=cap)
    if method == "SVR":
        return svr_fit(pair, classes, seed=seed, cap=cap)
    return hybrid_fit(pair, method.split("-")[0], threshold, classes, seed=seed, cap=cap)


def model_from_dict(d: dict):
    try:
        return _KINDS[d["kind"]].from_dict(d)
    except KeyError:
        raise ModelFileError(f"unrecognised model kind {d.get('kind')!r}") from None


def _dump(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1, allow_nan=False) + "\n", encoding="utf-8")


def _load(path: Path) -> dict:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ModelFileError(f"model file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: not valid JSON ({exc})") from None


def save_model(model, path, meta: dict | None = None) -> Path:
    """Write ``model`` to ``path`` (plus stage files for a hybrid)."""
    path = Path(path)
    if isinstance(model, HybridModel):
        stem = path.with_suffix("")
        s1 = stem.with_name(stem.name + ".stage1.json")
        s2 = stem.with_name(stem.name + ".stage2.json")
        _dump(model.stage1.to_dict(), s1)
        _dump(model.stage2.to_dict(), s2)
        doc = {"kind": "hybrid", "variant": model.variant,
               "stage1": s1.name, "stage2": s2.name}
    else:
        doc = model.to_dict()
    if meta:
        doc["meta"] = meta
    _dump(doc, path)
    return path


def load_model(path):
    """Inverse of :func:`save_model`; returns ``(model, meta)``."""
    path = Path(path)
    doc = _load(path)
    meta = doc.get("meta", {})
    if doc.get("kind") == "hybrid":
        stage1 = model_from_dict(_load(path.parent / doc["stage1"]))
        stage2 = model_from_dict(_load(path.parent / doc["stage2"]))
        if not isinstance(stage2, GprModel):
            raise ModelFileError(f"{path}: hybrid stage 2 must be a GPR model")
        return HybridModel(doc["variant"], stage1, stage2), meta
    return model_from_dict(doc), meta
