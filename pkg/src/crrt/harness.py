"""End-to-end poll driver: runs sessions, injects adversaries, persists transcripts and reports."""

from __future__ import annotations

import json
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .group import GroupParams, profile_params
from .ot import lor_bias_probe
from .protocols import PollConfig, SessionTranscript, reverify, run
from .protocols.config import normalize_variant
from .quantum import MALRES_LIMIT, SLACK, bound_sweep, eval_bounds, sweep_csv
from .stats import family, report_from_counts

ADVERSARY_NAMES = {
    "none": "honest",
    "halting-respondent": "halting",
    "weight-cheat": "weight-cheat",
    "boolean-cheat": "boolean-cheat",
    "parity-cheat": "parity-cheat",
    "lor-probe": "honest",
}
COUNTERPART = {"W-OT": "W-OT-weak", "W-OT-weak": "W-OT", "W-coin": "W-coin-weak", "W-coin-weak": "W-coin"}
BIAS_FLAG = 0.1


@dataclass(frozen=True)
class HarnessConfig:
    variant: str
    n: int
    l: int
    D: int | None = None
    ls: tuple[int, ...] = ()
    profile: str = "test"
    sessions: int = 1000
    adversary: str = "none"
    seed: int = 0
    pi: tuple[float, ...] = ()
    transcripts: str | None = None
    audits: str | None = None
    workers: int = 1
    lor_m: int = 2

    def __post_init__(self):
        object.__setattr__(self, "variant", normalize_variant(self.variant))
        if self.adversary not in ADVERSARY_NAMES:
            raise ValueError(f"unknown adversary {self.adversary!r}; choose from {sorted(ADVERSARY_NAMES)}")
        if self.sessions < 1:
            raise ValueError("need at least one session")
        self.poll_config()

    def poll_config(self) -> PollConfig:
        return PollConfig(self.variant, self.n, self.l, self.D, tuple(self.ls))

    def type_law(self) -> tuple[float, ...]:
        """Probability of each type: (Pr[t=0], Pr[t=1]) or (Pr[t=1..m]) for BD."""
        cfg = self.poll_config()
        if cfg.variant == "BD":
            law = self.pi or tuple(1 / cfg.m for _ in range(cfg.m))
            if len(law) != cfg.m:
                raise ValueError(f"BD needs {cfg.m} type probabilities")
        else:
            pi = self.pi[0] if self.pi else 0.5
            law = (1 - pi, pi)
        if abs(sum(law) - 1) > 1e-9 or min(law) < 0:
            raise ValueError("type probabilities must form a distribution")
        return tuple(law)


@dataclass
class RunReport:
    variant: str
    config: dict
    sessions: int
    adversary: str
    seed: int
    completed: int = 0
    halts: dict = field(default_factory=dict)
    matches: int = 0
    pr_r_eq_t: float | None = None
    expected_pr_r_eq_t: float | None = None
    conditional_bias: float | None = None
    estimate: dict | None = None
    reverified: int | None = None
    probe: dict | None = None
    halting_comparison: dict | None = None

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


def session_seeds(seed: int, i: int) -> tuple[random.Random, random.Random, random.Random]:
    """Independent rngs for the type draw, the interviewer and the respondent of session i."""
    return tuple(random.Random(f"{seed}:{i}:{role}") for role in ("type", "I", "R"))


def _draw_type(law, rng, bd: bool) -> int:
    k = rng.choices(range(len(law)), weights=law)[0]
    return k + 1 if bd else k


def run_one(params: GroupParams, hc: HarnessConfig, i: int, keep: bool) -> dict:
    cfg = hc.poll_config()
    trng, irng, rrng = session_seeds(hc.seed, i)
    t = _draw_type(hc.type_law(), trng, cfg.variant == "BD")
    res = run(params, cfg, t, f"{hc.seed}-{i}", irng, rrng, ADVERSARY_NAMES[hc.adversary])
    out = {"i": i, "t": t, **res.transcript.outcome}
    if keep:
        out["jsonl"] = res.transcript.to_jsonl()
        if res.audit is not None:
            out["audit"] = res.audit.to_json()
    return out


def _run_chunk(args) -> list[dict]:
    params_json, hc, indices, keep = args
    params = GroupParams.from_json(params_json)
    return [run_one(params, hc, i, keep) for i in indices]


def expected_match(cfg: PollConfig, t: int) -> float:
    """Pr[r = t] for an honest session of type t."""
    if cfg.variant == "BD":
        return cfg.p + cfg.ls[t - 1] / cfg.n
    if cfg.variant == "IQ":
        return cfg.p * t + (1 - cfg.p) / 2 if t == 1 else 1 - (1 - cfg.p) / 2
    return cfg.p


def run_sessions(params: GroupParams, hc: HarnessConfig, keep: bool) -> list[dict]:
    indices = list(range(hc.sessions))
    if hc.workers <= 1:
        return [run_one(params, hc, i, keep) for i in indices]
    chunks = [indices[k::hc.workers] for k in range(hc.workers)]
    with ProcessPoolExecutor(max_workers=hc.workers) as pool:
        parts = pool.map(_run_chunk, [(params.to_json(), hc, c, keep) for c in chunks])
        results = [row for part in parts for row in part]
    return sorted(results, key=lambda row: row["i"])


def summarize(hc: HarnessConfig, rows: list[dict]) -> RunReport:
    cfg = hc.poll_config()
    report = RunReport(cfg.variant, cfg.to_json(), hc.sessions, hc.adversary, hc.seed)
    halts = Counter()
    done = [r for r in rows if r["status"] == "completed"]
    for r in rows:
        if r["status"] == "halted":
            halts[f"step {r['step']} by {r['by']}: {r['reason']}"] += 1
    report.completed = len(done)
    report.halts = dict(sorted(halts.items()))
    report.matches = sum(r["r"] == r["t"] for r in done)
    if done:
        report.pr_r_eq_t = report.matches / len(done)
        report.expected_pr_r_eq_t = sum(expected_match(cfg, r["t"]) for r in done) / len(done)
        report.conditional_bias = report.pr_r_eq_t - report.expected_pr_r_eq_t
        fam = family(cfg.variant)
        labels = range(1, cfg.m + 1) if fam == "BD" else (0, 1)
        tally = Counter(r["r"] for r in done)
        report.estimate = report_from_counts(cfg.variant, [tally[k] for k in labels], cfg.p,
                                             [lj / cfg.n for lj in cfg.ls]).to_json()
    return report


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def run_poll(hc: HarnessConfig, params: GroupParams | None = None) -> RunReport:
    """Run every session, persist what was asked for, and summarize. Deterministic for a fixed seed."""
    params = params or profile_params(hc.profile)
    hc.poll_config().check_group(params)
    keep = bool(hc.transcripts or hc.audits)
    rows = run_sessions(params, hc, keep)
    report = summarize(hc, rows)
    if keep:
        texts = [r["jsonl"] for r in rows]
        report.reverified = sum(reverify(SessionTranscript.from_jsonl(t)) for t in texts)
        if hc.transcripts:
            _write(hc.transcripts, "".join(texts))
        if hc.audits:
            _write(hc.audits, "".join(json.dumps(r["audit"], sort_keys=True) + "\n" for r in rows if "audit" in r))
    if hc.adversary == "lor-probe":
        probe = lor_bias_probe(params, hc.n, hc.lor_m, hc.sessions, random.Random(f"{hc.seed}:lor"))
        report.probe = {"m": probe.m, "q": probe.q, "exact_zq": list(probe.exact),
                        "exact_group": list(probe.group_exact), "counts": list(probe.counts),
                        "trials": probe.trials, "gap": probe.gap, "bias_bound": probe.bias_bound}
    if hc.adversary == "halting-respondent" and hc.variant in COUNTERPART:
        other = replace(hc, variant=COUNTERPART[hc.variant], transcripts=None, audits=None)
        other_report = summarize(other, run_sessions(params, other, False))
        report.halting_comparison = {}
        for r in (report, other_report):
            bias = r.conditional_bias
            report.halting_comparison[r.variant] = {
                "completed": r.completed, "pr_r_eq_t": r.pr_r_eq_t, "conditional_bias": bias,
                "flagged": bias is not None and abs(bias) > BIAS_FLAG}
    return report


# Quantum report ------------------------------------------------------------------------------

DEFAULT_P_GRID = (0.51, 0.6, 0.75, 0.85, 0.9)


@dataclass
class QuantumReport:
    rows: list[dict]
    bounds: list[dict]

    @property
    def worst_slack(self) -> float:
        return min(r["slack"] for r in self.rows)

    @property
    def ok(self) -> bool:
        return self.worst_slack >= -SLACK

    def csv(self) -> str:
        return sweep_csv(self.rows)


def run_quantum_report(p_grid=DEFAULT_P_GRID, points: int = 100, diagonal: str = "optimal") -> QuantumReport:
    rows, bounds = [], []
    for p in p_grid:
        if not 0.5 < p < MALRES_LIMIT:
            raise ValueError(f"p = {p} outside (1/2, {MALRES_LIMIT:.4f})")
        rows += bound_sweep(p, points, diagonal)
        bounds.append(eval_bounds(p).to_json())
    return QuantumReport(rows, bounds)
