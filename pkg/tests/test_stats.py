import random

import numpy as np
import pytest

from crrt.protocols import PollConfig
from crrt.stats import (EstimationError, PollOutcome, answer_law, estimate_iq, estimate_outcome, estimate_prrt_bd,
                        estimate_warner, forward_simulate, monte_carlo_warner, report_from_counts, variance_iq,
                        variance_prrt_bd, variance_warner)

BD = PollConfig("BD", 10, 7, D=8, ls=(1, 1, 1))


def test_warner_forward_inverse():
    p_yes = 0.75 * 0.3 + 0.25 * 0.7
    assert p_yes == pytest.approx(0.4)
    assert estimate_warner(400, 1000, 0.75) == pytest.approx(0.3)


def test_warner_estimate_not_clamped():
    assert estimate_warner(0, 1000, 0.75) == pytest.approx(-0.5)
    rep = report_from_counts("W-OT", [1000, 0], 0.75)
    assert rep.out_of_range and rep.estimate[0] < 0 and rep.variance[0] >= 0


def test_warner_p_half_rejected():
    with pytest.raises(EstimationError):
        estimate_warner(10, 20, 0.5)
    with pytest.raises(EstimationError):
        estimate_warner(0, 0, 0.75)


def test_warner_variance_value_and_monotone():
    assert variance_warner(0.3, 1000, 0.75) == pytest.approx(0.00096)
    ps = np.linspace(0.51, 0.99, 200)
    vs = [variance_warner(0.3, 1000, float(p)) for p in ps]
    assert all(a > b for a, b in zip(vs, vs[1:]))


def test_warner_variance_monte_carlo():
    est = monte_carlo_warner(0.3, 1000, 0.75, 100_000, seed=1)
    mc = float(np.var(est, ddof=1))
    assert abs(variance_warner(0.3, 1000, 0.75) - mc) / mc <= 0.05
    assert abs(float(est.mean()) - 0.3) < 0.001


def test_iq_round_trip():
    p, pi = 0.75, 0.3
    lam = p * pi + (1 - p) / 2
    assert estimate_iq(round(lam * 10_000), 10_000, p) == pytest.approx(pi, abs=1e-4)
    assert variance_iq(pi, 1000, p) > 0


def test_bd_forward_inverse():
    pi, p_c, pv = (0.3, 0.2, 0.5), 0.5, (0.2, 0.2, 0.1)
    a = [p_c * x + q for x, q in zip(pi, pv)]
    assert a == pytest.approx([0.35, 0.3, 0.35])
    counts = [round(x * 1000) for x in a]
    assert estimate_prrt_bd(counts, 1000, p_c, pv) == pytest.approx(pi)
    assert all(v > 0 for v in variance_prrt_bd(pi, 1000, p_c, pv))


def test_bd_input_errors():
    with pytest.raises(EstimationError):
        estimate_prrt_bd([1, 2], 3, 0.5, (0.2, 0.2, 0.1))
    with pytest.raises(EstimationError):
        estimate_prrt_bd([1, 2, 3], 5, 0.5, (0.2, 0.2, 0.1))
    with pytest.raises(EstimationError):
        estimate_prrt_bd([1, 2, 3], 6, 0.5, (0.2, 0.2, 0.2))


def test_answer_laws():
    w = PollConfig("W-OT", 4, 3)
    assert answer_law(w, 1) == (0.25, 0.75) and answer_law(w, 0) == (0.75, 0.25)
    iq = PollConfig("IQ", 4, 3)
    assert answer_law(iq, 1)[1] == pytest.approx(0.75 + 0.25 / 2)
    assert answer_law(BD, 1) == pytest.approx((0.8, 0.1, 0.1))
    assert sum(answer_law(BD, 2)) == pytest.approx(1)


def test_forward_simulation_recovers_prevalence():
    w = estimate_outcome(forward_simulate("W-OT", 0.3, PollConfig("W-OT", 4, 3), 10_000, random.Random(1)))
    assert abs(w.estimate[0] - 0.3) <= 0.03
    iq = estimate_outcome(forward_simulate("IQ", 0.3, PollConfig("IQ", 4, 3), 10_000, random.Random(2)))
    assert abs(iq.estimate[0] - 0.3) <= 0.03
    bd = estimate_outcome(forward_simulate("BD", (0.5, 0.3, 0.2), BD, 10_000, random.Random(3)))
    assert max(abs(a - b) for a, b in zip(bd.estimate, (0.5, 0.3, 0.2))) <= 0.03


def test_poll_outcome_json_and_tally():
    out = forward_simulate("BD", (0.5, 0.3, 0.2), BD, 50, random.Random(4))
    back = PollOutcome.from_json(out.to_json())
    assert back == out
    counts = {str(k): c for k, c in zip((1, 2, 3), out.counts())}
    assert PollOutcome.from_json({"config": BD.to_json(), "counts": counts}).counts() == out.counts()
    lines = out.tally_csv().splitlines()
    assert lines[0] == "answer,count" and len(lines) == 4


def test_poll_outcome_rejects_bad_responses():
    with pytest.raises(EstimationError):
        PollOutcome.from_json({"config": PollConfig("W-OT", 4, 3).to_json(), "responses": [0, 2]})
    with pytest.raises(EstimationError):
        PollOutcome.from_json({"config": PollConfig("W-OT", 4, 3).to_json()})
