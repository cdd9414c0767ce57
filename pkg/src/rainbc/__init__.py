"""Bias correction of daily satellite/reanalysis rainfall against gauges."""

__version__ = "0.1.0"

from .config import RunConfig, load_config
from .core import (
                   WET_THRESHOLD,
                   DailySeries,
                   EventCategory,
                   IntensityClass,
                   PairedSeries,
                   align,
                   make_classes,
)
from .evaluation import run_pipeline
from .gpr import gpr_fit
from .hybrid import hybrid_fit
from .ingest import read_series, write_series
from .loci import loci_fit
from .metrics import compute_metrics, contingency, pod
from .models import fit_method, load_model, save_model
from .qm import qm_fit
from .seasonality import annual_stats, fit_occurrence, occurrence_curve
from .svr import svr_fit
from .synth import SynthSpec, generate_station, synth_generate

__all__ = [
    "WET_THRESHOLD", "DailySeries", "EventCategory", "IntensityClass", "PairedSeries",
    "RunConfig", "SynthSpec", "align", "annual_stats", "compute_metrics", "contingency",
    "fit_method", "fit_occurrence", "generate_station", "gpr_fit", "hybrid_fit",
    "load_config", "load_model", "loci_fit", "make_classes", "occurrence_curve", "pod",
    "qm_fit", "read_series", "run_pipeline", "save_model", "svr_fit", "synth_generate",
    "write_series",
]
