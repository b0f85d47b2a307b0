"""Poll parameters shared by all CRRT protocol variants."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..group import GroupParams

VARIANTS = ("W-OT", "W-OT-weak", "W-coin", "W-coin-weak", "IQ", "BD")
PROTOCOL_IDS = {name: i for i, name in enumerate(VARIANTS, start=1)}
MAX_BD_TYPES = 10


class ConfigError(ValueError):
    pass


def normalize_variant(name: str) -> str:
    for v in VARIANTS:
        if v.lower() == name.lower():
            return v
    raise ConfigError(f"unknown variant {name!r}; expected one of {', '.join(VARIANTS)}")


@dataclass(frozen=True)
class PollConfig:
    """p_c = l/n. For BD, ``ls`` holds l_1..l_m and D is the encoding base."""

    variant: str
    n: int
    l: int
    D: int | None = None
    ls: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "variant", normalize_variant(self.variant))
        object.__setattr__(self, "ls", tuple(self.ls))
        n, l = self.n, self.l
        if n < 1 or l < 1 or l > n:
            raise ConfigError("need 1 <= l <= n")
        if self.variant.startswith("W"):
            if 2 * l <= n:
                raise ConfigError("W variants need l/n > 1/2")
            if l == n:
                raise ConfigError("l = n leaves no randomization")
        if self.variant == "BD":
            if not self.ls or len(self.ls) > MAX_BD_TYPES:
                raise ConfigError(f"BD needs 1..{MAX_BD_TYPES} type weights")
            if any(x < 0 for x in self.ls) or l + sum(self.ls) != n:
                raise ConfigError("BD needs l + sum(l_i) = n with l_i >= 0")
            if self.D is None or self.D < max(l, *self.ls) + 1:
                raise ConfigError("BD needs D >= max(l, l_1..l_m) + 1")

    @property
    def protocol_id(self) -> int:
        return PROTOCOL_IDS[self.variant]

    @property
    def p(self) -> float:
        return self.l / self.n

    @property
    def d(self) -> int:
        """Number of coin-flip candidates, ceil(1 / (1 - l/n))."""
        if self.variant == "W-coin-weak":
            return 1
        return -(-self.n // (self.n - self.l))

    @property
    def m(self) -> int:
        return len(self.ls)

    @property
    def positions(self) -> int:
        """Number of OT positions (2n for IQ)."""
        return 2 * self.n if self.variant == "IQ" else self.n

    @property
    def weak(self) -> bool:
        return self.variant.endswith("-weak")

    def bd_values(self, params: GroupParams) -> tuple[int, ...]:
        """D^1..D^m reduced mod q; rejects collisions."""
        vals = tuple(pow(self.D, j, params.q) for j in range(1, self.m + 1))
        if len(set(vals)) != len(vals) or 0 in vals:
            raise ConfigError("D^1..D^m collide modulo q for this group")
        return vals

    def check_group(self, params: GroupParams) -> None:
        """Reject configurations whose small integers would wrap modulo q."""
        if self.variant == "BD":
            self.bd_values(params)
        if self.variant.startswith("W-coin"):
            if 4 * self.n > params.q:
                raise ConfigError("range arguments need n <= q/4")
            top = 2 * (self.n - 1) + (self.d - 1) * self.l + self.n
            if top >= params.q:
                raise ConfigError("coin-flip arithmetic would wrap modulo q")

    def to_json(self) -> dict:
        out = {"variant": self.variant, "n": self.n, "l": self.l}
        if self.variant == "BD":
            out["D"] = self.D
            out["ls"] = list(self.ls)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "PollConfig":
        return cls(obj["variant"], int(obj["n"]), int(obj["l"]), obj.get("D"), tuple(obj.get("ls", ())))
