"""Rank-preserving transfers and their predicted effect on each index.

A transfer moves a positive amount c from the person at rank H (the
giver) to the person at rank L < H (the receiver).  It is admissible
when every strict inequality between consecutive order statistics still
holds afterwards, so the amount is capped by the gaps to the ranks'
neighbours — or by half the giver/receiver gap when the two are adjacent.

Direction predictions depend on where L and H sit relative to the median
rank M = ceil(n/2) and on the strategy:

    strategy 1: a transfer across the median decreases the index; a
                transfer on one side leaves it unchanged.
    strategy 2: across the median or between two struggling people it
                decreases; between two well-off people the sign depends on
                the amount relative to a closed-form threshold.
    strategy 3: across the median it decreases; on one side it increases.

If either L or H is the median person itself, the bookkeeping above does
not apply and prediction is refused (the transfer itself still executes).
Observed directions treat |change| <= 1e-12 as "unchanged".
"""
from __future__ import annotations

from dataclasses import dataclass
from math import isfinite

import numpy as np

from .empirical import Sample, make_sample, psi1_n, psi2_n, psi3_n

__all__ = [
    "TransferError", "MedianTransferError", "PlanStepError",
    "STRUGGLING", "MEDIAN", "WELL_OFF",
    "DECREASE", "UNCHANGED", "INCREASE",
    "Transfer", "classify", "max_admissible", "apply_transfer",
    "threshold_c2", "threshold_c3", "predict_effect", "observed_effect",
    "TransferOutcome", "evaluate_transfer", "run_plan", "parse_plan",
    "trajectory_csv", "UNCHANGED_TOL",
]

STRUGGLING = "struggling"
MEDIAN = "median"
WELL_OFF = "well_off"

DECREASE = "decrease"
UNCHANGED = "unchanged"
INCREASE = "increase"

UNCHANGED_TOL = 1e-12


class TransferError(ValueError):
    """A transfer violates rank bounds or admissibility."""


class MedianTransferError(TransferError):
    """Prediction refused because the median person gives or receives."""


class PlanStepError(TransferError):
    """A step of a transfer plan failed; carries the 1-based step number."""

    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step


@dataclass(frozen=True)
class Transfer:
    """Amount c moving from the rank-H giver to the rank-L receiver."""

    L: int
    H: int
    c: float

    def __post_init__(self) -> None:
        if not isinstance(self.L, (int, np.integer)) or not isinstance(self.H, (int, np.integer)):
            raise TransferError(f"ranks must be integers, got L={self.L!r} H={self.H!r}")
        if not 1 <= self.L < self.H:
            raise TransferError(
                f"ranks must satisfy 1 <= L < H, got L={self.L} H={self.H}")
        if not (isfinite(self.c) and self.c > 0.0):
            raise TransferError(f"transfer amount must be positive and finite, got {self.c!r}")


def classify(s: Sample, rank: int) -> str:
    """Position of a rank relative to the median person M."""
    if not 1 <= rank <= s.n:
        raise TransferError(f"rank {rank} out of range for a sample of size {s.n}")
    M = s.median_rank
    if rank < M:
        return STRUGGLING
    if rank == M:
        return MEDIAN
    return WELL_OFF


def _check_ranks(s: Sample, L: int, H: int) -> None:
    if not isinstance(L, (int, np.integer)) or not isinstance(H, (int, np.integer)):
        raise TransferError(f"ranks must be integers, got L={L!r} H={H!r}")
    if not (1 <= L < H <= s.n):
        raise TransferError(
            f"ranks must satisfy 1 <= L < H <= n={s.n}, got L={L} H={H}")


def _no_tie(s: Sample, a: int, b: int) -> None:
    """Ranks a < b are neighbours of L or H; equal values block every c."""
    if s.values[a - 1] == s.values[b - 1]:
        raise TransferError(
            f"tie between X_{{{a}:{s.n}}} and X_{{{b}:{s.n}}} makes the strict "
            f"ordering unsatisfiable for any amount")


def max_admissible(s: Sample, L: int, H: int) -> float:
    """Supremum of transfer amounts that keep the strict income ordering.

    Admissible amounts form the open interval (0, sup): the receiver may
    not catch up with the next rank, the giver may not fall to the
    previous one, and adjacent ranks may not cross at the midpoint.
    """
    _check_ranks(s, L, H)
    if L >= 2:
        _no_tie(s, L - 1, L)
    if H <= s.n - 1:
        _no_tie(s, H, H + 1)
    if H == L + 1:
        _no_tie(s, L, H)
        return 0.5 * (float(s.values[H - 1]) - float(s.values[L - 1]))
    _no_tie(s, L, L + 1)
    _no_tie(s, H - 1, H)
    return min(float(s.values[L]) - float(s.values[L - 1]),
               float(s.values[H - 1]) - float(s.values[H - 2]))


def apply_transfer(s: Sample, t: Transfer) -> Sample:
    """Execute an admissible transfer, returning the new ordered sample."""
    sup = max_admissible(s, t.L, t.H)
    if not 0.0 < t.c < sup:
        raise TransferError(
            f"amount c={t.c} outside the admissible range (0, {sup}) "
            f"for L={t.L} H={t.H}")
    values = np.array(s.values, dtype=float)
    values[t.L - 1] += t.c
    values[t.H - 1] -= t.c
    return make_sample(values)


def _threshold(num_lo: float, num_hi: float, x_l: float, x_h: float) -> float:
    den = num_lo * x_h + num_hi * x_l
    if den == 0.0:
        raise TransferError("direction threshold undefined (zero denominator)")
    return (num_lo * x_h * x_h - num_hi * x_l * x_l) / den


def threshold_c2(s: Sample, L: int, H: int) -> float:
    """Strategy-2 direction threshold for a transfer between well-off ranks.

    Amounts above it decrease the index, amounts below increase it, and
    the threshold itself leaves the index unchanged.  A nonpositive
    threshold means every admissible amount decreases the index.
    """
    _check_ranks(s, L, H)
    M = s.median_rank
    if not M < L:
        raise TransferError(
            f"strategy-2 threshold needs M < L < H, got M={M} L={L} H={H}")
    return _threshold(s.order(L - M), s.order(H - M), s.order(L), s.order(H))


def threshold_c3(s: Sample, L: int, H: int) -> float:
    """Strategy-3 analogue of threshold_c2; it always exceeds the admissible
    supremum, which is why same-side transfers always increase strategy 3."""
    _check_ranks(s, L, H)
    M = s.median_rank
    if not M < L:
        raise TransferError(
            f"strategy-3 threshold needs M < L < H, got M={M} L={L} H={H}")
    n = s.n
    return _threshold(s.order(n - L + 1), s.order(n - H + 1), s.order(L), s.order(H))


def predict_effect(s: Sample, k: int, t: Transfer) -> str:
    """Predicted direction ("decrease" / "unchanged" / "increase") of index k."""
    if k not in (1, 2, 3):
        raise ValueError(f"strategy must be 1, 2, or 3, got {k!r}")
    sup = max_admissible(s, t.L, t.H)
    if not t.c < sup:
        raise TransferError(
            f"amount c={t.c} outside the admissible range (0, {sup}) "
            f"for L={t.L} H={t.H}")
    M = s.median_rank
    if t.L == M or t.H == M:
        raise MedianTransferError(
            f"rank {M} is the median person; no direction is predicted "
            f"when it gives or receives")
    crosses = t.L < M < t.H
    if k == 1:
        return DECREASE if crosses else UNCHANGED
    if k == 3:
        return DECREASE if crosses else INCREASE
    if crosses or t.H < M:
        return DECREASE
    c2 = threshold_c2(s, t.L, t.H)
    if t.c > c2:
        return DECREASE
    if t.c == c2:
        return UNCHANGED
    return INCREASE


def observed_effect(before: float, after: float, tol: float = UNCHANGED_TOL) -> str:
    """Direction of an observed index change, with |delta| <= tol as no change."""
    delta = after - before
    if abs(delta) <= tol:
        return UNCHANGED
    return DECREASE if delta < 0.0 else INCREASE


@dataclass(frozen=True)
class TransferOutcome:
    """One executed transfer: indices before/after, predictions, agreement."""

    transfer: Transfer
    admissible_sup: float
    sample_after: Sample
    psi_before: tuple[float, float, float]
    psi_after: tuple[float, float, float]
    predicted: tuple[str | None, str | None, str | None]
    observed: tuple[str, str, str]

    @property
    def consistent(self) -> bool:
        return all(p is None or p == o
                   for p, o in zip(self.predicted, self.observed))


def evaluate_transfer(s: Sample, t: Transfer) -> TransferOutcome:
    """Apply a transfer and compare predicted directions with observed ones.

    Predictions are None when the median person is involved; the transfer
    is still executed.
    """
    sup = max_admissible(s, t.L, t.H)
    after = apply_transfer(s, t)
    before_vals = (psi1_n(s), psi2_n(s), psi3_n(s))
    after_vals = (psi1_n(after), psi2_n(after), psi3_n(after))
    predicted: list[str | None] = []
    for k in (1, 2, 3):
        try:
            predicted.append(predict_effect(s, k, t))
        except MedianTransferError:
            predicted.append(None)
    observed = tuple(observed_effect(b, a) for b, a in zip(before_vals, after_vals))
    return TransferOutcome(
        transfer=t, admissible_sup=sup, sample_after=after,
        psi_before=before_vals, psi_after=after_vals,
        predicted=tuple(predicted), observed=observed,
    )


def run_plan(s: Sample, plan: list[Transfer]) -> list[tuple[Sample, float, float, float]]:
    """Apply a plan step by step; returns (sample, psi1, psi2, psi3) per step."""
    out = []
    current = s
    for i, t in enumerate(plan, start=1):
        try:
            current = apply_transfer(current, t)
        except TransferError as exc:
            raise PlanStepError(i, str(exc)) from exc
        out.append((current, psi1_n(current), psi2_n(current), psi3_n(current)))
    return out


def parse_plan(text: str) -> list[Transfer]:
    """Parse a plan file: one `L H c` triple per line, `#` comments allowed."""
    plan = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise PlanStepError(
                len(plan) + 1, f"line {lineno}: expected `L H c`, got {raw!r}")
        try:
            L, H, c = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise PlanStepError(
                len(plan) + 1,
                f"line {lineno}: non-numeric entry in {raw!r}") from None
        try:
            plan.append(Transfer(L, H, c))
        except TransferError as exc:
            raise PlanStepError(len(plan) + 1, f"line {lineno}: {exc}") from exc
    return plan


def trajectory_csv(plan: list[Transfer],
                   results: list[tuple[Sample, float, float, float]],
                   precision: int = 4) -> str:
    """Render a replayed plan as `step,L,H,c,psi1,psi2,psi3` CSV."""
    lines = ["step,L,H,c,psi1,psi2,psi3"]
    for i, (t, (_, p1, p2, p3)) in enumerate(zip(plan, results), start=1):
        lines.append(
            f"{i},{t.L},{t.H},{t.c:.{precision}f},"
            f"{p1:.{precision}f},{p2:.{precision}f},{p3:.{precision}f}")
    return "\n".join(lines) + "\n"
