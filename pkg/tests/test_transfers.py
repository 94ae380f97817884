"""Tests for admissible transfers, direction thresholds, and predictions."""
import math

import numpy as np
import pytest

from medineq.empirical import make_sample, psi1_n, psi2_n, psi3_n
from medineq.transfers import (
    DECREASE,
    INCREASE,
    MEDIAN,
    STRUGGLING,
    UNCHANGED,
    WELL_OFF,
    MedianTransferError,
    PlanStepError,
    Transfer,
    TransferError,
    apply_transfer,
    classify,
    evaluate_transfer,
    max_admissible,
    observed_effect,
    parse_plan,
    predict_effect,
    run_plan,
    threshold_c2,
    threshold_c3,
    trajectory_csv,
)

V0 = (1, 3, 5, 7, 10, 20, 24)

# moves V0 through three of the example snapshots
MAIN_PLAN = [Transfer(3, 5, 1.0), Transfer(2, 6, 2.0), Transfer(1, 7, 3.0)]
MAIN_TRAJECTORY = [
    ((1, 3, 6, 7, 9, 20, 24), "0.5238", "0.8296", "0.7139"),
    ((1, 5, 6, 7, 9, 18, 24), "0.4286", "0.7870", "0.6713"),
    ((4, 5, 6, 7, 9, 18, 21), "0.2857", "0.6640", "0.6217"),
]

# a longer route to the same final sample
ALT_PLAN = [Transfer(5, 6, 3.0), Transfer(6, 7, 3.0), Transfer(3, 6, 1.0),
            Transfer(2, 6, 1.0), Transfer(2, 5, 1.0), Transfer(1, 5, 3.0)]
ALT_PSI2 = ["0.8461", "0.8450", "0.8265", "0.8050", "0.7844", "0.6640"]


# ---------------------------------------------------------------------------
# construction and classification


def test_transfer_validation():
    t = Transfer(5, 6, 2.0)
    assert (t.L, t.H, t.c) == (5, 6, 2.0)
    with pytest.raises(TransferError):
        Transfer(0, 2, 1.0)
    with pytest.raises(TransferError):
        Transfer(2, 2, 1.0)
    with pytest.raises(TransferError):
        Transfer(3, 2, 1.0)
    with pytest.raises(TransferError):
        Transfer(1, 2, 0.0)
    with pytest.raises(TransferError):
        Transfer(1, 2, -1.0)
    with pytest.raises(TransferError):
        Transfer(1, 2, math.inf)


def test_classify_against_the_median_person():
    s = make_sample(V0)
    assert [classify(s, r) for r in range(1, 8)] == [
        STRUGGLING, STRUGGLING, STRUGGLING, MEDIAN,
        WELL_OFF, WELL_OFF, WELL_OFF]
    for bad in (0, 8):
        with pytest.raises(TransferError):
            classify(s, bad)


# ---------------------------------------------------------------------------
# admissible amounts


def test_max_admissible_adjacent_pair_is_half_the_gap():
    assert max_admissible(make_sample(V0), 5, 6) == 5.0


def test_max_admissible_separated_pair_is_min_neighbour_gap():
    assert max_admissible(make_sample(V0), 2, 6) == 2.0
    assert max_admissible(make_sample((1, 2, 3)), 1, 3) == 1.0


def test_max_admissible_rank_validation():
    s = make_sample(V0)
    with pytest.raises(TransferError, match="1 <= L < H"):
        max_admissible(s, 6, 6)
    with pytest.raises(TransferError, match="1 <= L < H"):
        max_admissible(s, 1, 8)
    with pytest.raises(TransferError, match="integers"):
        max_admissible(s, 1.5, 3)  # type: ignore[arg-type]


def test_max_admissible_tie_blocks_everything():
    with pytest.raises(TransferError, match=r"tie between X_\{1:3\} and X_\{2:3\}"):
        max_admissible(make_sample((1, 1, 3)), 1, 3)
    with pytest.raises(TransferError, match="tie"):
        max_admissible(make_sample((1, 2, 2)), 2, 3)


def test_apply_transfer_moves_and_conserves():
    s = make_sample(V0)
    after = apply_transfer(s, Transfer(5, 6, 2.0))
    assert after.values.tolist() == [1, 3, 5, 7, 12, 18, 24]
    assert after.total == s.total


def test_apply_transfer_rejects_inadmissible_amounts():
    s = make_sample(V0)
    with pytest.raises(TransferError, match=r"outside the admissible range \(0, 5.0\)"):
        apply_transfer(s, Transfer(5, 6, 6.0))
    # the supremum itself would create a tie, so it is excluded too
    with pytest.raises(TransferError, match="outside the admissible range"):
        apply_transfer(s, Transfer(5, 6, 5.0))


# ---------------------------------------------------------------------------
# direction thresholds


def test_threshold_c2_on_the_example_vector():
    assert threshold_c2(make_sample(V0), 5, 6) == 2.0


def test_threshold_c2_second_step():
    s = make_sample((1, 3, 5, 7, 13, 17, 24))
    assert threshold_c2(s, 6, 7) == pytest.approx(283 / 157, rel=1e-15)
    assert max_admissible(s, 6, 7) == 3.5


def test_threshold_c3_exceeds_the_admissible_range():
    s = make_sample(V0)
    c3 = threshold_c3(s, 5, 6)
    assert c3 == pytest.approx(170 / 13, rel=1e-15)
    assert c3 > max_admissible(s, 5, 6)


def test_thresholds_require_well_off_ranks():
    s = make_sample(V0)
    with pytest.raises(TransferError, match="needs M < L < H"):
        threshold_c2(s, 2, 6)
    with pytest.raises(TransferError, match="needs M < L < H"):
        threshold_c3(s, 4, 6)


def test_threshold_c2_can_be_negative():
    # with a very small bottom income the numerator goes negative, so every
    # admissible amount already decreases the strategy-2 index
    s = make_sample((1, 100, 101, 102, 110))
    assert threshold_c2(s, 4, 5) < 0.0
    outcome = evaluate_transfer(s, Transfer(4, 5, 0.5))
    assert outcome.predicted[1] == DECREASE
    assert outcome.observed[1] == DECREASE


# ---------------------------------------------------------------------------
# predictions


def test_predict_effect_strategy1():
    s = make_sample(V0)
    assert predict_effect(s, 1, Transfer(2, 6, 1.0)) == DECREASE
    assert predict_effect(s, 1, Transfer(5, 6, 1.0)) == UNCHANGED
    assert predict_effect(s, 1, Transfer(1, 2, 0.5)) == UNCHANGED


def test_predict_effect_strategy3():
    s = make_sample(V0)
    assert predict_effect(s, 3, Transfer(2, 6, 1.0)) == DECREASE
    assert predict_effect(s, 3, Transfer(5, 6, 1.0)) == INCREASE
    assert predict_effect(s, 3, Transfer(1, 2, 0.5)) == INCREASE


def test_predict_effect_strategy2_branches():
    s = make_sample(V0)
    assert predict_effect(s, 2, Transfer(2, 6, 1.0)) == DECREASE
    assert predict_effect(s, 2, Transfer(1, 2, 0.5)) == DECREASE
    assert predict_effect(s, 2, Transfer(5, 6, 1.0)) == INCREASE
    assert predict_effect(s, 2, Transfer(5, 6, 3.0)) == DECREASE
    assert predict_effect(s, 2, Transfer(5, 6, 2.0)) == UNCHANGED


def test_predictions_refuse_the_median_person():
    s = make_sample(V0)
    for t in (Transfer(4, 6, 1.0), Transfer(1, 4, 1.0)):
        for k in (1, 2, 3):
            with pytest.raises(MedianTransferError, match="median person"):
                predict_effect(s, k, t)


def test_predict_effect_validates_inputs():
    s = make_sample(V0)
    with pytest.raises(ValueError, match="strategy"):
        predict_effect(s, 4, Transfer(5, 6, 1.0))
    with pytest.raises(TransferError, match="admissible"):
        predict_effect(s, 1, Transfer(5, 6, 5.0))


def test_observed_effect_tolerance():
    assert observed_effect(0.5, 0.5 + 5e-13) == UNCHANGED
    assert observed_effect(0.5, 0.5 + 1e-9) == INCREASE
    assert observed_effect(0.5, 0.4) == DECREASE
    assert observed_effect(0.5, 0.6, tol=0.2) == UNCHANGED


# ---------------------------------------------------------------------------
# one evaluated transfer


def test_evaluate_transfer_at_the_threshold():
    s = make_sample(V0)
    outcome = evaluate_transfer(s, Transfer(5, 6, 2.0))
    assert outcome.admissible_sup == 5.0
    assert outcome.sample_after.values.tolist() == [1, 3, 5, 7, 12, 18, 24]
    assert outcome.predicted == (UNCHANGED, UNCHANGED, INCREASE)
    assert outcome.observed == (UNCHANGED, UNCHANGED, INCREASE)
    assert outcome.consistent
    assert abs(outcome.psi_after[1] - outcome.psi_before[1]) <= 1e-12


def test_evaluate_transfer_with_median_gives_no_prediction():
    s = make_sample(V0)
    outcome = evaluate_transfer(s, Transfer(4, 6, 1.0))
    assert outcome.predicted == (None, None, None)
    assert outcome.consistent  # vacuously: nothing was predicted
    assert outcome.sample_after.values.tolist() == [1, 3, 5, 8, 10, 19, 24]


def test_randomized_predictions_always_agree():
    rng = np.random.default_rng(314159)
    agreements = 0
    trials = 0
    while trials < 400:
        n = int(rng.integers(5, 26))
        # strictly increasing positive incomes, so no ties block transfers
        values = np.cumsum(rng.uniform(0.5, 3.0, size=n))
        s = make_sample(values)
        M = s.median_rank
        L, H = sorted(rng.choice(np.arange(1, n + 1), size=2, replace=False))
        if L == H or L == M or H == M:
            continue
        sup = max_admissible(s, int(L), int(H))
        c = float(sup * rng.uniform(0.05, 0.95))
        t = Transfer(int(L), int(H), c)
        if M < L:
            c2 = threshold_c2(s, int(L), int(H))
            if abs(c - c2) < 1e-9 * max(1.0, abs(c2)):
                continue  # too close to the direction boundary to call
        outcome = evaluate_transfer(s, t)
        trials += 1
        agreements += outcome.consistent
    assert agreements == trials == 400


# ---------------------------------------------------------------------------
# plans


def test_run_plan_main_route():
    results = run_plan(make_sample(V0), MAIN_PLAN)
    assert len(results) == 3
    for (sample, p1, p2, p3), (values, e1, e2, e3) in zip(results, MAIN_TRAJECTORY):
        assert sample.values.tolist() == list(values)
        assert (f"{p1:.4f}", f"{p2:.4f}", f"{p3:.4f}") == (e1, e2, e3)


def test_run_plan_alternative_route():
    results = run_plan(make_sample(V0), ALT_PLAN)
    assert [f"{p2:.4f}" for _, _, p2, _ in results] == ALT_PSI2
    assert results[-1][0].values.tolist() == [4, 5, 6, 7, 9, 18, 21]


def test_run_plan_reports_the_failing_step():
    plan = [Transfer(5, 6, 2.0), Transfer(5, 6, 999.0)]
    with pytest.raises(PlanStepError, match="^step 2: ") as exc:
        run_plan(make_sample(V0), plan)
    assert exc.value.step == 2


def test_run_plan_empty_plan_is_a_no_op():
    assert run_plan(make_sample(V0), []) == []


def test_parse_plan_happy_path():
    text = "# comment\n5 6 2\n\n6 7 3   # trailing comment\n"
    plan = parse_plan(text)
    assert plan == [Transfer(5, 6, 2.0), Transfer(6, 7, 3.0)]


@pytest.mark.parametrize("text, fragment", [
    ("1 2\n", "expected `L H c`"),
    ("a b c\n", "non-numeric"),
    ("1 2 3 4\n", "expected `L H c`"),
    ("2 1 0.5\n", "1 <= L < H"),
])
def test_parse_plan_rejects_malformed_lines(text, fragment):
    with pytest.raises(PlanStepError, match=fragment):
        parse_plan(text)


def test_parse_plan_error_carries_the_line_number():
    with pytest.raises(PlanStepError, match="line 3"):
        parse_plan("# header\n5 6 2\noops\n")


def test_trajectory_csv_layout():
    results = run_plan(make_sample(V0), MAIN_PLAN)
    text = trajectory_csv(MAIN_PLAN, results)
    assert text == (
        "step,L,H,c,psi1,psi2,psi3\n"
        "1,3,5,1.0000,0.5238,0.8296,0.7139\n"
        "2,2,6,2.0000,0.4286,0.7870,0.6713\n"
        "3,1,7,3.0000,0.2857,0.6640,0.6217\n"
    )
