"""Parametric quantile families for heavy-tailed income modelling.

Every family is defined directly through its quantile function Q(p) on
0 < p < 1, so no density or CDF code is needed anywhere downstream:

    uniform      theta * p
    exponential  -theta * ln(1 - p)
    gamma        theta * G(shape, p)          (G inverts the regularized
                                               lower incomplete gamma)
    weibull      theta * (-ln(1 - p)) ** (1 / tau)
    lognormal    exp(mu + sigma * z(p))       (z is the normal quantile)
    logcauchy    exp(mu + sigma * tan(pi * (p - 1/2)))
    paretoII     sigma * ((1 - p) ** (-1 / alpha) - 1)
    paretoIII    sigma * (p / (1 - p)) ** gamma
    paretoIV     sigma * ((1 - p) ** (-1 / alpha) - 1) ** gamma

All quantile functions are nonnegative and nondecreasing on (0, 1).
Scale parameters (theta, sigma) default to 1 and mu defaults to 0;
shape parameters must be given explicitly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .special import inverse_normal_cdf, inverse_reg_gamma, reg_lower_gamma

__all__ = [
    "QuantileModel", "make_model", "parse_model_spec", "quantile",
    "inverse_normal_cdf", "inverse_reg_gamma", "reg_lower_gamma",
    "FAMILIES",
]


def _q_uniform(g, p):
    return g("theta") * p


def _q_exponential(g, p):
    return -g("theta") * math.log1p(-p)


def _q_gamma(g, p):
    return g("theta") * inverse_reg_gamma(g["alpha"], p)


def _q_weibull(g, p):
    return g("theta") * (-math.log1p(-p)) ** (1.0 / g["tau"])


def _q_lognormal(g, p):
    return math.exp(g("mu") + g["sigma"] * inverse_normal_cdf(p))


def _log_q_lognormal(g, p):
    return g("mu") + g["sigma"] * inverse_normal_cdf(p)


def _q_logcauchy(g, p):
    return math.exp(g("mu") + g["sigma"] * math.tan(math.pi * (p - 0.5)))


def _log_q_logcauchy(g, p):
    return g("mu") + g["sigma"] * math.tan(math.pi * (p - 0.5))


def _q_pareto2(g, p):
    return g("sigma") * ((1.0 - p) ** (-1.0 / g["alpha"]) - 1.0)


def _q_pareto3(g, p):
    return g("sigma") * (p / (1.0 - p)) ** g["gamma"]


def _q_pareto4(g, p):
    return g("sigma") * ((1.0 - p) ** (-1.0 / g["alpha"]) - 1.0) ** g["gamma"]


# family -> (required shape params, optional params with defaults,
#            quantile evaluator, closed-form log-quantile or None)
FAMILIES = {
    "uniform": ((), {"theta": 1.0}, _q_uniform, None),
    "exponential": ((), {"theta": 1.0}, _q_exponential, None),
    "gamma": (("alpha",), {"theta": 1.0}, _q_gamma, None),
    "weibull": (("tau",), {"theta": 1.0}, _q_weibull, None),
    "lognormal": (("sigma",), {"mu": 0.0}, _q_lognormal, _log_q_lognormal),
    "logcauchy": (("sigma",), {"mu": 0.0}, _q_logcauchy, _log_q_logcauchy),
    "paretoII": (("alpha",), {"sigma": 1.0}, _q_pareto2, None),
    "paretoIII": (("gamma",), {"sigma": 1.0}, _q_pareto3, None),
    "paretoIV": (("alpha", "gamma"), {"sigma": 1.0}, _q_pareto4, None),
}

_CANONICAL = {k.lower().replace("-", "").replace("_", ""): k for k in FAMILIES}
# a few spellings seen in the wild
_CANONICAL["pareto2"] = "paretoII"
_CANONICAL["pareto3"] = "paretoIII"
_CANONICAL["pareto4"] = "paretoIV"


@dataclass(frozen=True)
class QuantileModel:
    """A fully parameterized member of one quantile family."""

    family: str
    params: tuple[tuple[str, float], ...]

    def __getitem__(self, name: str) -> float:
        for key, value in self.params:
            if key == name:
                return value
        raise KeyError(name)

    def __call__(self, name: str) -> float:
        return self[name]

    @property
    def label(self) -> str:
        """Round-trippable spec string, e.g. ``paretoIV:sigma=1,alpha=2,gamma=2``."""
        if not self.params:
            return self.family
        args = ",".join(f"{k}={v:g}" for k, v in self.params)
        return f"{self.family}:{args}"

    def quantile(self, p: float) -> float:
        if not 0.0 < p < 1.0:
            raise ValueError(f"quantile requires 0 < p < 1, got {p!r}")
        try:
            return FAMILIES[self.family][2](self, p)
        except OverflowError:
            # Every family is nondecreasing with values in [0, inf), so a
            # range error can only come from an upper tail that exceeds the
            # largest representable double (e.g. log-Cauchy near p = 1).
            return math.inf

    def log_quantile(self, p: float) -> float | None:
        """log Q(p) where the family has a closed form (else None)."""
        fn = FAMILIES[self.family][3]
        if fn is None:
            return None
        if not 0.0 < p < 1.0:
            raise ValueError(f"quantile requires 0 < p < 1, got {p!r}")
        return fn(self, p)

    @property
    def has_log_form(self) -> bool:
        return FAMILIES[self.family][3] is not None


def make_model(family: str, **params: float) -> QuantileModel:
    """Build a QuantileModel, validating family name and parameter values."""
    key = _CANONICAL.get(family.lower().replace("-", "").replace("_", ""))
    if key is None:
        known = ", ".join(sorted(FAMILIES))
        raise ValueError(f"unknown quantile family {family!r} (known: {known})")
    required, defaults, _, _ = FAMILIES[key]
    values = dict(defaults)
    for name, value in params.items():
        if name not in required and name not in defaults:
            raise ValueError(f"{key} does not take a parameter named {name!r}")
        values[name] = float(value)
    for name in required:
        if name not in values:
            raise ValueError(f"{key} requires parameter {name!r}")
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"{key} parameter {name}={value!r} must be finite")
        if name != "mu" and value <= 0.0:
            raise ValueError(f"{key} parameter {name}={value!r} must be positive")
    order = [n for n in ("theta", "sigma", "mu", "alpha", "tau", "gamma") if n in values]
    return QuantileModel(key, tuple((n, values[n]) for n in order))


def parse_model_spec(text: str) -> QuantileModel:
    """Parse ``family:name=value,name=value`` (parameters optional)."""
    head, _, tail = text.strip().partition(":")
    if not head:
        raise ValueError(f"empty model spec {text!r}")
    params: dict[str, float] = {}
    if tail:
        for item in tail.split(","):
            name, eq, raw = item.partition("=")
            name = name.strip()
            if not eq or not name:
                raise ValueError(f"malformed parameter {item!r} in model spec {text!r}")
            try:
                params[name] = float(raw)
            except ValueError:
                raise ValueError(
                    f"non-numeric value for {name!r} in model spec {text!r}") from None
    return make_model(head, **params)


def quantile(model: QuantileModel, p: float) -> float:
    """Evaluate Q(p) for the given model."""
    return model.quantile(p)
