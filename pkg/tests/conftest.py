import numpy as np
import pytest

from surf4d.catalog import get_fixture
from surf4d.charts import eval_jet2, metric
from surf4d.invariants import (
    invariant_set,
    normal_frame,
    second_fundamental,
    weingarten,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def chart_of(name):
    return get_fixture(name).chart


def full_point(chart, u, v, tol=1e-9):
    """jet, metric, frame, second form, Weingarten data and invariants."""
    jet = eval_jet2(chart, u, v)
    met = metric(jet)
    frame = normal_frame(jet)
    sff = second_fundamental(jet, frame)
    wf = weingarten(met, sff)
    inv = invariant_set(met, wf, sff, tol=tol)
    return jet, met, frame, sff, wf, inv


def invariants_at(chart, u, v, tol=1e-9):
    return full_point(chart, u, v, tol=tol)[5]
