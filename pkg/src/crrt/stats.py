"""Response models and unbiased estimators for Warner, innocuous-question and Bourke-Dalenius RRT."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .protocols.config import PollConfig

FAMILIES = {"W-OT": "W", "W-OT-weak": "W", "W-coin": "W", "W-coin-weak": "W", "IQ": "IQ", "BD": "BD"}


class EstimationError(ValueError):
    pass


def family(variant: str) -> str:
    """W, IQ or BD."""
    if variant in ("W", "IQ", "BD"):
        return variant
    try:
        return FAMILIES[variant]
    except KeyError:
        raise EstimationError(f"unknown variant {variant!r}") from None


def _check_p(p: float) -> None:
    if abs(2 * p - 1) < 1e-15:
        raise EstimationError("p = 1/2 makes the Warner estimator undefined")


# Estimators --------------------------------------------------------------------------

def estimate_warner(L: int, N: int, p: float) -> float:
    """(L/N - (1-p)) / (2p - 1); not clamped, so it stays unbiased."""
    if N <= 0:
        raise EstimationError("need N > 0")
    _check_p(p)
    return (L / N - (1 - p)) / (2 * p - 1)


def variance_warner(pi: float, N: int, p: float) -> float:
    """pi(1-pi)/N + p(1-p) / (N (2p-1)^2)."""
    if N <= 0:
        raise EstimationError("need N > 0")
    _check_p(p)
    return pi * (1 - pi) / N + p * (1 - p) / (N * (2 * p - 1) ** 2)


def estimate_iq(L: int, N: int, p: float) -> float:
    """Answer 1 with probability p*pi + (1-p)/2, so pi = (lambda - (1-p)/2) / p."""
    if N <= 0:
        raise EstimationError("need N > 0")
    if p <= 0:
        raise EstimationError("need p > 0")
    return (L / N - (1 - p) / 2) / p


def variance_iq(pi: float, N: int, p: float) -> float:
    lam = p * pi + (1 - p) / 2
    return lam * (1 - lam) / (N * p * p)


def estimate_prrt_bd(answer_counts: Sequence[int], N: int, p_c: float,
                     p_vector: Sequence[float]) -> tuple[float, ...]:
    """pi_i = (a_i - p_i) / p_c with a_i the share answering i."""
    if len(answer_counts) != len(p_vector):
        raise EstimationError("counts and p vector differ in length")
    if sum(answer_counts) != N or N <= 0:
        raise EstimationError("counts must sum to N > 0")
    if p_c <= 0:
        raise EstimationError("need p_c > 0")
    if abs(p_c + sum(p_vector) - 1) > 1e-9:
        raise EstimationError("p_c + sum(p_i) must be 1")
    return tuple((c / N - pi) / p_c for c, pi in zip(answer_counts, p_vector))


def variance_prrt_bd(pi: Sequence[float], N: int, p_c: float, p_vector: Sequence[float]) -> tuple[float, ...]:
    a = [p_c * x + q for x, q in zip(pi, p_vector)]
    return tuple(ai * (1 - ai) / (N * p_c * p_c) for ai in a)


# Forward models ------------------------------------------------------------------------

def answer_law(config: PollConfig, t: int) -> tuple[float, ...]:
    """Pr[answer = k | type t]; k in {0, 1} for W and IQ, k in [1, m] (index k-1) for BD."""
    fam = family(config.variant)
    p = config.p
    if fam == "W":
        return (p, 1 - p) if t == 0 else (1 - p, p)
    if fam == "IQ":
        one = p * t + (1 - p) / 2
        return (1 - one, one)
    law = [lj / config.n for lj in config.ls]
    law[t - 1] += p
    return tuple(law)


@dataclass(frozen=True)
class PollOutcome:
    variant: str
    config: PollConfig
    responses: tuple[int, ...]

    @property
    def N(self) -> int:
        return len(self.responses)

    def counts(self) -> tuple[int, ...]:
        c = Counter(self.responses)
        if family(self.variant) == "BD":
            return tuple(c[j] for j in range(1, self.config.m + 1))
        return (c[0], c[1])

    def to_json(self) -> dict:
        return {"variant": self.variant, "config": self.config.to_json(), "responses": list(self.responses)}

    @classmethod
    def from_json(cls, obj: dict) -> "PollOutcome":
        config = PollConfig.from_json(obj["config"])
        variant = obj.get("variant", config.variant)
        if "responses" in obj:
            responses = tuple(int(x) for x in obj["responses"])
        elif "counts" in obj:
            responses = tuple(int(k) for k, c in sorted(obj["counts"].items()) for _ in range(int(c)))
        else:
            raise EstimationError("poll file needs 'responses' or 'counts'")
        allowed = set(range(1, config.m + 1)) if family(variant) == "BD" else {0, 1}
        if not set(responses) <= allowed:
            raise EstimationError(f"responses outside {sorted(allowed)}")
        return cls(variant, config, responses)

    def tally_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["answer", "count"])
        labels = range(1, self.config.m + 1) if family(self.variant) == "BD" else (0, 1)
        for label, c in zip(labels, self.counts()):
            w.writerow([label, c])
        return out.getvalue()


def _draw_types(pi, fam: str, N: int, rng) -> list[int]:
    if fam == "BD":
        weights = list(pi)
        return rng.choices(range(1, len(weights) + 1), weights=weights, k=N)
    return [1 if rng.random() < pi else 0 for _ in range(N)]


def forward_simulate(variant: str, pi, config: PollConfig, N: int, rng) -> PollOutcome:
    """N independent respondents drawn from the variant's response law, without cryptography."""
    fam = family(variant)
    if fam == "BD" and (len(pi) != config.m or abs(sum(pi) - 1) > 1e-9):
        raise EstimationError("BD needs a probability vector of length m")
    labels = tuple(range(1, config.m + 1)) if fam == "BD" else (0, 1)
    laws = {}
    responses = []
    for t in _draw_types(pi, fam, N, rng):
        if t not in laws:
            laws[t] = answer_law(config, t)
        responses.append(rng.choices(labels, weights=laws[t])[0])
    return PollOutcome(variant, config, tuple(responses))


def monte_carlo_warner(pi: float, N: int, p: float, polls: int, seed: int) -> np.ndarray:
    """estimate_warner over ``polls`` independent polls: types ~ Bin(N, pi), then randomized answers."""
    _check_p(p)
    g = np.random.default_rng(seed)
    types = g.binomial(N, pi, size=polls)
    yes = g.binomial(types, p) + g.binomial(N - types, 1 - p)
    return (yes / N - (1 - p)) / (2 * p - 1)


# Reports ----------------------------------------------------------------------------------

@dataclass(frozen=True)
class EstimateReport:
    variant: str
    estimate: tuple[float, ...]
    variance: tuple[float, ...]
    n: int
    out_of_range: bool

    def to_json(self) -> dict:
        return {"variant": self.variant, "estimate": list(self.estimate), "variance": list(self.variance),
                "n": self.n, "out_of_range": self.out_of_range}


def _clip(x: float) -> float:
    return min(1.0, max(0.0, x))


def report_from_counts(variant: str, counts: Sequence[int], p: float,
                       p_vector: Sequence[float] = ()) -> EstimateReport:
    """Point estimates plus plug-in variances (from the clipped estimate, so they stay >= 0).

    ``counts`` is (#0, #1) for W and IQ, or the per-answer counts for BD, with
    ``p`` the truthful probability p_c and ``p_vector`` the forced-answer probabilities.
    """
    fam = family(variant)
    N = sum(counts)
    if fam == "BD":
        est = estimate_prrt_bd(counts, N, p, p_vector)
        var = variance_prrt_bd([_clip(x) for x in est], N, p, p_vector)
    elif fam == "IQ":
        est = (estimate_iq(counts[1], N, p),)
        var = (variance_iq(_clip(est[0]), N, p),)
    else:
        est = (estimate_warner(counts[1], N, p),)
        var = (variance_warner(_clip(est[0]), N, p),)
    if not all(math.isfinite(x) for x in est):
        raise EstimationError("estimate is not finite")
    return EstimateReport(variant, tuple(est), tuple(var), N, any(not 0 <= x <= 1 for x in est))


def estimate_outcome(outcome: PollOutcome) -> EstimateReport:
    config = outcome.config
    return report_from_counts(outcome.variant, outcome.counts(), config.p,
                              [lj / config.n for lj in config.ls])
