"""Passivity-based local stability compliance for grid-connected devices."""

import json

from ._core import *  # noqa: F401,F403
from ._core import (
    _cluster_check,
    _comply_json,
    _jacobian_json,
    _vector_fit,
    _verdict_json,
)

__version__ = "0.1.0"


def passivity_verdict(model, band="full", f_min=0.01, f_max=200.0, points=400):
    """Verdict of the three positive-real conditions as a dict."""
    return json.loads(_verdict_json(model, band, f_min, f_max, points))


def vector_fit(freq_hz, samples, order=10, auto_order=False, tol=1e-4, uniform=False):
    """Fit samples of shape (N, 2, 2); returns (RationalModel, report dict)."""
    model, report = _vector_fit(list(freq_hz), samples, order, auto_order, tol, uniform)
    return model, json.loads(report)


def load_flow_jacobian(network, contributions=None, lossless=False):
    """J_LF report for a network given as a dict (or JSON text)."""
    if not isinstance(network, str):
        network = json.dumps(network)
    if contributions is None:
        contributions = ""
    elif not isinstance(contributions, str):
        contributions = json.dumps({str(k): v for k, v in contributions.items()})
    return json.loads(_jacobian_json(network, contributions, lossless))


def comply(freq_hz, samples, op, tau=0.01, kqvc=0.0, order=10, auto_order=False):
    """Run the compliance procedure on a scan; returns the report dict."""
    return json.loads(_comply_json(list(freq_hz), samples, op, tau, kqvc, order, auto_order))


def cluster_check(eigenvalues):
    return _cluster_check(list(eigenvalues))
