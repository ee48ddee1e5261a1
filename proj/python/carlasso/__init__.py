"""Chain graph LASSO samplers (CAR-LASSO, adaptive CAR-LASSO, Bayesian graphical LASSO)."""

import json

from . import _core
from ._core import (
    CarlassoError,
    Sampler,
    alpha_centrality,
    effective_sample_size,
    parse_formula,
    partial_correlations,
)

__all__ = [
    "CarlassoError",
    "Fit",
    "Sampler",
    "alpha_centrality",
    "effective_sample_size",
    "fit",
    "graph",
    "load_summary",
    "parse_formula",
    "partial_correlations",
    "simulate",
]


class Fit:
    """Result of :func:`fit`: the parsed summary document plus raw draws."""

    def __init__(self, summary_json, draws, runtime):
        self.summary = json.loads(summary_json)
        self.summary_json = summary_json
        self.draws = draws
        self.runtime = runtime

    def mean(self, block):
        """Posterior mean of a block ("omega", "b", "mu", ...) as nested lists."""
        return self.summary[block + "_mean"]["values"]

    @property
    def draw_count(self):
        return self.summary["metadata"]["draw_count"]


def fit(formula, data, **kwargs):
    """Fit the model. `data` is a CSV path or a mapping column -> values.

    Keyword arguments mirror the command-line flags (link, adaptive,
    n_iter, burn_in, thin, seed, chains, ci_level, r_beta, delta_beta,
    r_omega, delta_omega, out, force).
    """
    if not isinstance(data, dict):
        data = str(data)
    return Fit(*_core.fit(formula, data, **kwargs))


def load_summary(fit_dir, ci_level=None):
    return json.loads(_core.load_summary(str(fit_dir), ci_level))


def graph(fit_dir, format="json", **kwargs):
    text = _core.graph(str(fit_dir), format, **kwargs)
    return json.loads(text) if format == "json" else text


def simulate(**kwargs):
    """Returns (columns, formula, truth) for synthetic data."""
    return _core.simulate(**kwargs)
