"""Equality curves and their scalar indices for parametric models.

For a model with quantile function Q, three curves on 0 < p < 1 compare
the income of a person at the p-th quantile of the struggling half with
a reference person:

    strategy 1   Q(p/2) / Q(1/2)        the median person
    strategy 2   Q(p/2) / Q(1/2 + p/2)  the equally-ranked well-off person,
                                        counted upward from the median
    strategy 3   Q(p/2) / Q(1 - p/2)    the equally-ranked well-off person,
                                        counted downward from the top

Each curve maps into [0, 1]; the corresponding inequality index is one
minus the area under the curve.  Integration uses composite Gauss-Legendre
quadrature whose panels shrink geometrically toward both endpoints: several
curves behave like powers of log near p = 0 or p = 1, where equally wide
panels lose six or more digits.  The panel layout depends only on the panel
count, so refining the budget still refines every region of the unit
interval.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .quantiles import QuantileModel, make_model

__all__ = [
    "QuadratureConfig", "DEFAULT_QUADRATURE", "psi", "psi_index",
    "CurveSamples", "curve_samples", "curve_csv", "curve_json",
    "parse_curve_csv", "RankedModel", "rank_models", "CATALOG",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Budget for the composite Gauss-Legendre rule."""

    panels: int = 512
    nodes: int = 8

    def __post_init__(self) -> None:
        if not isinstance(self.panels, int) or self.panels < 1:
            raise ValueError(f"panels must be an integer >= 1, got {self.panels!r}")
        if not isinstance(self.nodes, int) or self.nodes < 2:
            raise ValueError(f"nodes must be an integer >= 2, got {self.nodes!r}")


DEFAULT_QUADRATURE = QuadratureConfig()

_JUST_BELOW_ONE = math.nextafter(1.0, 0.0)


def _check_strategy(k: int) -> None:
    if k not in (1, 2, 3):
        raise ValueError(f"strategy must be 1, 2, or 3, got {k!r}")


def psi(model: QuantileModel, k: int, p: float) -> float:
    """Evaluate the strategy-k equality curve at p (0 < p < 1).

    Families with a closed-form log quantile are evaluated in log space,
    which keeps the ratio finite even where a single quantile would
    overflow or underflow double precision.
    """
    _check_strategy(k)
    if not 0.0 < p < 1.0:
        raise ValueError(f"curve argument requires 0 < p < 1, got {p!r}")
    num_p = 0.5 * p
    if k == 1:
        den_p = 0.5
    elif k == 2:
        den_p = 0.5 + 0.5 * p
    else:
        den_p = 1.0 - 0.5 * p
        if den_p >= 1.0:
            # 1 - p/2 rounds to 1 for p below one ulp; the nearest
            # representable argument can only shrink the ratio further
            # toward its true value of ~0.
            den_p = _JUST_BELOW_ONE
    if model.has_log_form:
        diff = model.log_quantile(num_p) - model.log_quantile(den_p)
        return math.exp(diff) if diff < 0.0 else 1.0
    den = model.quantile(den_p)
    if den <= 0.0:
        raise ValueError(
            f"equality ratio undefined: quantile at p={den_p} is {den} (zero denominator)")
    ratio = model.quantile(num_p) / den
    return ratio if ratio <= 1.0 else 1.0


@lru_cache(maxsize=32)
def _gl_rule(nodes: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    x, w = np.polynomial.legendre.leggauss(nodes)
    return tuple(float(v) for v in x), tuple(float(v) for v in w)


@lru_cache(maxsize=64)
def _panel_bounds(panels: int) -> tuple[float, ...]:
    """Panel edges on [0, 1], geometrically refined toward both ends.

    A quarter of the budget (capped at 60 panels on the left, 40 on the
    right) is spent halving the outermost eighth again and again; the
    innermost right-hand panel stays wider than ~1e-13 so that every
    quadrature node remains strictly inside (0, 1) in double precision.
    """
    left_depth = min(60, panels // 4)
    right_depth = min(40, panels // 4)
    if left_depth == 0 or right_depth == 0:
        return tuple(i / panels for i in range(panels + 1))
    edge = 0.125
    left = [0.0] + [edge * 2.0 ** (j - left_depth) for j in range(1, left_depth + 1)]
    interior = panels - left_depth - right_depth
    core = np.linspace(edge, 1.0 - edge, interior + 1)[1:-1]
    right = [1.0 - edge * 2.0 ** (-j) for j in range(right_depth)] + [1.0]
    return tuple(left + [float(v) for v in core] + right)


def psi_index(model: QuantileModel, k: int,
              quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Inequality index for strategy k: one minus the area under the curve."""
    _check_strategy(k)
    nodes, weights = _gl_rule(quad.nodes)
    bounds = _panel_bounds(quad.panels)
    area = 0.0
    for i in range(quad.panels):
        a = bounds[i]
        b = bounds[i + 1]
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        acc = 0.0
        for t, w in zip(nodes, weights):
            acc += w * psi(model, k, mid + half * t)
        area += half * acc
    value = 1.0 - area
    if value < 0.0:
        return 0.0
    return value if value <= 1.0 else 1.0


@dataclass(frozen=True)
class CurveSamples:
    """A sampled equality curve plus its integrated index."""

    strategy: int
    model_label: str
    index_value: float
    points: tuple[tuple[float, float], ...]


def curve_samples(model: QuantileModel, k: int, n_points: int,
                  quad: QuadratureConfig = DEFAULT_QUADRATURE,
                  label: str | None = None) -> CurveSamples:
    """Sample the curve on the interior grid p_i = i / (n_points + 1)."""
    if not isinstance(n_points, int) or n_points < 2:
        raise ValueError(f"n_points must be an integer >= 2, got {n_points!r}")
    grid = [(i / (n_points + 1)) for i in range(1, n_points + 1)]
    pts = tuple((p, psi(model, k, p)) for p in grid)
    return CurveSamples(
        strategy=k,
        model_label=model.label if label is None else label,
        index_value=psi_index(model, k, quad),
        points=pts,
    )


def curve_csv(samples: CurveSamples) -> str:
    lines = [
        f"# strategy={samples.strategy} index={samples.index_value!r} "
        f"model={samples.model_label}",
        "p,psi",
    ]
    lines.extend(f"{p!r},{v!r}" for p, v in samples.points)
    return "\n".join(lines) + "\n"


def curve_json(samples: CurveSamples) -> str:
    return json.dumps({
        "strategy": samples.strategy,
        "model": samples.model_label,
        "index": samples.index_value,
        "points": [[p, v] for p, v in samples.points],
    })


_CURVE_HEADER = re.compile(r"^#\s*strategy=(\d+)\s+index=(\S+)\s+model=(.*)$")


def parse_curve_csv(text: str) -> CurveSamples:
    """Inverse of curve_csv, used for round-trip checks and re-integration."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise ValueError("curve CSV needs a comment header and a column header")
    m = _CURVE_HEADER.match(lines[0])
    if m is None:
        raise ValueError(f"malformed curve header {lines[0]!r}")
    if lines[1].strip() != "p,psi":
        raise ValueError(f"expected column header 'p,psi', got {lines[1]!r}")
    pts = []
    for ln in lines[2:]:
        a, _, b = ln.partition(",")
        pts.append((float(a), float(b)))
    return CurveSamples(
        strategy=int(m.group(1)),
        model_label=m.group(3),
        index_value=float(m.group(2)),
        points=tuple(pts),
    )


@dataclass(frozen=True)
class RankedModel:
    """One row of a ranking table (rank 1 = lowest index)."""

    label: str
    value: float
    rank_start: int
    rank_end: int

    @property
    def rank_display(self) -> str:
        if self.rank_start == self.rank_end:
            return str(self.rank_start)
        return f"{self.rank_start}-{self.rank_end}"


def rank_models(entries: list[tuple[str, QuantileModel]], k: int,
                quad: QuadratureConfig = DEFAULT_QUADRATURE,
                tie_tol: float = 1e-4) -> list[RankedModel]:
    """Rank models by their strategy-k index, ascending.

    Entries whose indices differ by at most ``tie_tol`` share a rank range
    (displayed like ``3-4``); exact ties are ordered by label.
    """
    _check_strategy(k)
    scored = sorted(
        ((label, psi_index(model, k, quad)) for label, model in entries),
        key=lambda t: (t[1], t[0]),
    )
    out: list[RankedModel] = []
    i = 0
    while i < len(scored):
        j = i + 1
        while j < len(scored) and scored[j][1] - scored[j - 1][1] <= tie_tol:
            j += 1
        for label, value in scored[i:j]:
            out.append(RankedModel(label, value, i + 1, j))
        i = j
    return out


CATALOG: tuple[tuple[str, QuantileModel], ...] = (
    ("Uniform", make_model("uniform")),
    ("Exponential", make_model("exponential")),
    ("Gamma(alpha=0.5)", make_model("gamma", alpha=0.5)),
    ("Gamma(alpha=2)", make_model("gamma", alpha=2)),
    ("Weibull(tau=0.5)", make_model("weibull", tau=0.5)),
    ("Weibull(tau=2)", make_model("weibull", tau=2)),
    ("Lognormal(sigma=1)", make_model("lognormal", sigma=1)),
    ("Lognormal(sigma=2)", make_model("lognormal", sigma=2)),
    ("Log-Cauchy(sigma=1)", make_model("logcauchy", sigma=1)),
    ("Log-Cauchy(sigma=2)", make_model("logcauchy", sigma=2)),
    ("Pareto-II(alpha=1)", make_model("paretoII", alpha=1)),
    ("Pareto-II(alpha=2)", make_model("paretoII", alpha=2)),
    ("Pareto-III(gamma=0.5)", make_model("paretoIII", gamma=0.5)),
    ("Pareto-III(gamma=2)", make_model("paretoIII", gamma=2)),
    ("Pareto-IV(alpha=0.5,gamma=0.5)", make_model("paretoIV", alpha=0.5, gamma=0.5)),
    ("Pareto-IV(alpha=2,gamma=2)", make_model("paretoIV", alpha=2, gamma=2)),
)
