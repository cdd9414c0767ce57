import numpy as np
import pytest
from hypothesis import settings

from rainbc.core import DailySeries, align
from rainbc.synth import SynthSpec, generate_station

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")


def days(start, n):
    return np.arange(np.datetime64(start), np.datetime64(start) + n, dtype="datetime64[D]")


def series(values, start="2000-01-01", sid="ST1"):
    values = np.asarray(values, dtype=float)
    return DailySeries(sid, days(start, values.size), values)


@pytest.fixture(scope="session")
def synth_pair():
    """One default synthetic station, 1981-2010, split at 2001."""
    g, s = generate_station(SynthSpec(n_stations=1), 0)
    return align(g, s)


@pytest.fixture(scope="session")
def short_pair():
    """A short synthetic station (1996-2003) for the slower learners."""
    g, s = generate_station(SynthSpec(n_stations=1, start_year=1996, end_year=2003), 0)
    return align(g, s)


SMALL_SPEC = {"n_stations": 3, "start_year": 1996, "end_year": 2003}


@pytest.fixture(scope="session")
def small_inputs(tmp_path_factory):
    """Three synthetic stations written as gauge.csv / sre.csv."""
    from rainbc.synth import synth_generate

    d = tmp_path_factory.mktemp("inputs")
    synth_generate(SynthSpec(**SMALL_SPEC), d)
    return d


def write_config(path, inputs, out, methods="LOCI, QM", extra=""):
    path.write_text(
        "[inputs]\n"
        f"gauge = {inputs / 'gauge.csv'}\n"
        f"sre = SYN={inputs / 'sre.csv'}\n"
        "[pipeline]\n"
        f"methods = {methods}\n"
        f"out = {out}\n"
        "[correction]\n"
        "cap = 150\n" + extra,
        encoding="utf-8",
    )
    return path
