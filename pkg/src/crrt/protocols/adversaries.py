"""Scripted misbehaving respondents for soundness and halting experiments.

Cheaters that cannot produce an honest proof fall back to ``forge``: the
public statement is rebuilt and run through the prover with a junk witness,
which is the best a prover without a witness can do short of guessing the
challenge.
"""

from __future__ import annotations

import hashlib

from .. import sigma as ak
from ..pedersen import commit_random
from .coin import Bundle, CoinRespondent, answer_bits, bundle_context, parity_commitment, prove_bundle
from .config import PollConfig
from .ot_based import OtRespondent, WeakRespondent, lin_coefficients
from .wire import Halt

ADVERSARIES = ("honest", "halting", "weight-cheat", "boolean-cheat", "parity-cheat")


def forge(params, st: ak.Statement, context: bytes, rng) -> ak.ArgumentTranscript:
    wit = [(0, tuple(rng.randrange(params.q) for _ in clause[0].bases)) for clause in st.clauses]
    return ak.prove_statement(params, st, wit, context, rng)


def predict_index(view: bytes, size: int) -> int:
    """A deterministic guess of the interviewer's hidden index from the public view."""
    return int.from_bytes(hashlib.sha256(b"crrt/adversary-guess" + view).digest()[:8], "big") % size


# Protocol 1, CRRT-IQ (OT flow) -----------------------------------------------------------

class HaltingOtRespondent(OtRespondent):
    """Halts when its guess of sigma says the answer would not be t."""

    def on_chooser_message(self, chooser) -> None:
        view = b"".join(x.to_bytes(self.params.element_len, "big") for x in (chooser.A, chooser.B, chooser.C))
        guess = predict_index(view, self.config.positions)
        answer = self.types[guess] if self.config.variant == "BD" else self.values[guess]
        if answer != self.t:
            raise Halt(1, "respondent walked away")


class WeightCheatRespondent(OtRespondent):
    """Every bit set to t: Boolean holds, AK-Lin is forged."""

    def prepare(self) -> None:
        super().prepare()
        self.values = [self.t] * self.config.positions
        c, o = commit_random(self.params, 1 - self.t, self.rng)
        self.extra = [(c, o)]

    def arguments(self, commitments, openings, ctx):
        a, b = lin_coefficients(self.config)
        return [ak.prove_boolean(self.params, commitments, openings, ctx, self.rng),
                forge(self.params, ak.lin_statement(self.params, commitments, a, b), ctx, self.rng)]


def _boolean_breaking(bits: list[int]) -> list[int]:
    """Move weight from one 1 onto another, keeping the sum: (1, 1) -> (2, 0)."""
    ones = [i for i, b in enumerate(bits) if b == 1]
    out = list(bits)
    if len(ones) >= 2:
        out[ones[0]], out[ones[1]] = 2, 0
    else:
        zero = bits.index(0)
        out[ones[0]], out[zero] = 2, -1
    return out


class BooleanCheatRespondent(OtRespondent):
    """Commits a 2 somewhere with the sum intact: AK-Lin honest, Boolean forged."""

    def prepare(self) -> None:
        super().prepare()
        self.values = _boolean_breaking(self.values)

    def arguments(self, commitments, openings, ctx):
        a, b = lin_coefficients(self.config)
        return [forge(self.params, ak.boolean_statement(self.params, commitments), ctx, self.rng),
                ak.prove_lin(self.params, commitments, openings, a, b, ctx, self.rng)]


class HaltingWeakRespondent(WeakRespondent):
    def on_sigma(self, sigma: int) -> None:
        if self.prep.bits[sigma - 1] != self.t:
            raise Halt(2, "respondent walked away")


# Protocol 2 --------------------------------------------------------------------------

class HaltingCoinRespondent(CoinRespondent):
    """Halts when the answer at the (guessed) sigma would not be t."""

    def on_coin(self, coin, answers) -> None:
        if self.config.weak:
            guess = 0
        else:
            guess = predict_index(self.params.encode_element(coin.y.element) + coin.nu.to_bytes(2, "big"),
                                  self.config.d)
        if answers[guess] != self.t:
            raise Halt(2, "respondent walked away")


class ParityCheatRespondent(CoinRespondent):
    """Answers t everywhere (flipping index 0 if that happens to be honest) and forges parity."""

    def answers(self, nu: int) -> list[int]:
        out = [self.t] * self.config.d
        if out == answer_bits(self.config, self.t, self.mu, nu):
            out[0] = 1 - self.t
        return out

    def bundles(self, nu, answers, ctx):
        honest = answer_bits(self.config, self.t, self.mu, nu)
        out = []
        for i, (bit, want) in enumerate(zip(answers, honest)):
            b = prove_bundle(self.params, self.config, self.ct, self.ot, self.cmu, self.omu, nu, i, want, ctx, self.rng)
            if bit != want:
                st = ak.set_statement(self.params, parity_commitment(self.params, self.ct, b.cb, bit), (1, 3))
                b = Bundle(b.cz, b.ce, b.cb, b.args[:-1] + (forge(self.params, st, bundle_context(ctx, i), self.rng),))
            out.append(b)
        return out


def respondent_class(config: PollConfig, adversary: str = "honest"):
    """Role class for a variant and adversary name; raises KeyError for unsupported pairs."""
    Ot = OtRespondent
    table = {
        ("W-OT", "honest"): Ot, ("IQ", "honest"): Ot, ("BD", "honest"): Ot,
        ("W-OT", "halting"): HaltingOtRespondent, ("IQ", "halting"): HaltingOtRespondent,
        ("BD", "halting"): HaltingOtRespondent,
        ("W-OT", "weight-cheat"): WeightCheatRespondent, ("IQ", "weight-cheat"): WeightCheatRespondent,
        ("W-OT", "boolean-cheat"): BooleanCheatRespondent, ("IQ", "boolean-cheat"): BooleanCheatRespondent,
        ("W-OT-weak", "honest"): WeakRespondent, ("W-OT-weak", "halting"): HaltingWeakRespondent,
        ("W-coin", "honest"): CoinRespondent, ("W-coin-weak", "honest"): CoinRespondent,
        ("W-coin", "halting"): HaltingCoinRespondent, ("W-coin-weak", "halting"): HaltingCoinRespondent,
        ("W-coin", "parity-cheat"): ParityCheatRespondent, ("W-coin-weak", "parity-cheat"): ParityCheatRespondent,
    }
    try:
        return table[(config.variant, adversary)]
    except KeyError:
        raise KeyError(f"adversary {adversary!r} is not defined for {config.variant}") from None
