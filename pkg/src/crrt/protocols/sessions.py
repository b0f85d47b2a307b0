"""One-call drivers for every variant, and offline re-verification of transcripts."""

from __future__ import annotations

from dataclasses import dataclass

from ..codec import DecodeError
from ..group import GroupParams, test_params
from ..pedersen import verify_opening
from . import coin, ot_based
from .adversaries import respondent_class
from .config import PollConfig
from .wire import SessionTranscript, run_session


@dataclass
class SessionResult:
    transcript: SessionTranscript
    interviewer: object

    @property
    def r(self) -> int | None:
        return self.transcript.result

    @property
    def audit(self) -> coin.AuditRecord | None:
        return getattr(self.interviewer, "record", None)


def interviewer_class(config: PollConfig):
    if config.variant.startswith("W-coin"):
        return coin.CoinInterviewer
    if config.variant == "W-OT-weak":
        return ot_based.WeakInterviewer
    return ot_based.OtInterviewer


def respondent_first(config: PollConfig) -> bool:
    return config.variant == "W-OT-weak" or config.variant.startswith("W-coin")


def run(params: GroupParams, config: PollConfig, t: int, session_id: str, interviewer_rng, respondent_rng,
        adversary: str = "honest", key=None) -> SessionResult:
    """Drive one session between an interviewer and a (possibly adversarial) respondent."""
    config.check_group(params)
    interviewer = interviewer_class(config)(params, config, interviewer_rng, session_id)
    cls = respondent_class(config, adversary)
    if config.variant.startswith("W-coin"):
        respondent = cls(params, config, t, respondent_rng, session_id, key=key)
    else:
        respondent = cls(params, config, t, respondent_rng, session_id)
    tr = SessionTranscript(session_id, config, params)
    run_session(tr, interviewer, respondent, "R" if respondent_first(config) else "I")
    return SessionResult(tr, interviewer)


def _runner(variants: tuple[str, ...]):
    def go(config: PollConfig, t: int, interviewer_rng, respondent_rng, params: GroupParams | None = None,
           session_id: str = "session-0", adversary: str = "honest", key=None) -> SessionResult:
        if config.variant not in variants:
            raise ValueError(f"expected variant in {variants}, got {config.variant}")
        return run(params or test_params(), config, t, session_id, interviewer_rng, respondent_rng, adversary, key)
    return go


p1_run = _runner(("W-OT",))
p1_weak_run = _runner(("W-OT-weak",))
p2_run = _runner(("W-coin",))
p2_weak_run = _runner(("W-coin-weak",))
iq_run = _runner(("IQ",))
bd_run = _runner(("BD",))


# Offline replay -----------------------------------------------------------------------

def _public_checks(tr: SessionTranscript):
    """Yield (step, ok) for every recorded message that carries public arguments."""
    params, config, sid = tr.params, tr.config, tr.session_id
    v = config.variant
    if v in ("W-OT", "IQ", "BD"):
        msg = tr.message(2)
        if msg is not None:
            sender, extras, args = ot_based.decode_ot_reply(params, msg.payload)
            yield 2, ot_based.verify_ot_reply(params, config, sid, sender, extras, args)
    elif v == "W-OT-weak":
        m1, m2, m3 = tr.message(1), tr.message(2), tr.message(3)
        if m1 is not None:
            cs, args = ot_based.decode_commit_message(params, m1.payload)
            yield 1, ot_based.verify_commit_message(params, config, sid, cs, args)
        if m3 is not None:
            sigma = ot_based.decode_sigma(m2.payload)
            o = ot_based.decode_opening(params, m3.payload)
            ok = 1 <= sigma <= config.n and o.value in (0, 1) and verify_opening(params, cs[sigma - 1], o)
            yield 3, ok and (not tr.completed or tr.result == o.value)
    else:
        m1, m2, m3 = tr.message(1), tr.message(2), tr.message(3)
        if m1 is not None:
            first = coin.CommitStep.from_bytes(params, config, m1.payload)
            yield 1, coin.verify_commit_step(params, config, sid, first)
        if m2 is not None:
            c = coin.CoinStep.from_bytes(params, config, m2.payload)
            yield 2, coin.verify_coin_step(params, config, sid, c)
        if m3 is not None:
            ans = coin.AnswerStep.from_bytes(params, config, m3.payload)
            ok = coin.verify_answer_step(params, config, sid, first, c, ans)
            if config.weak and tr.completed:
                ok = ok and tr.result == ans.mu_prime[0]
            yield 3, ok


def reverify(tr: SessionTranscript) -> bool:
    """Re-run every public check and confirm the recorded outcome is consistent with it.

    A completed session needs every check to pass. A halted session needs the
    messages before the halt step to pass and, when the interviewer halted for
    a failed argument, that argument to fail on replay too.
    """
    if tr.outcome is None:
        return False
    try:
        checks = list(_public_checks(tr))
    except (DecodeError, ValueError, TypeError, AttributeError):
        return tr.outcome.get("status") == "halted" and "malformed" in tr.outcome.get("reason", "")
    if tr.completed:
        return bool(checks) and all(ok for _, ok in checks)
    step = tr.outcome["step"]
    if not all(ok for s, ok in checks if s < step):
        return False
    if tr.outcome.get("by") == "I" and "verification failed" in tr.outcome.get("reason", ""):
        return any(s == step and not ok for s, ok in checks)
    return True
