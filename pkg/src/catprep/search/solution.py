"""Certified solutions and their ``key: value`` text format."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..circuits import PartialTransversalCX, VerifiedPrepCircuit, assemble, build_balanced_tree
from ..errors import FormatError

_KEYS = ("w", "w_prime", "t", "controls", "targets", "engine", "seed", "certified")


@dataclass
class Solution:
    """A wiring certified by the exhaustive oracle at order ``t``.

    Data and ancilla circuits are the balanced trees of widths ``w`` and ``w_prime``.
    """

    w: int
    w_prime: int
    t: int
    controls: list[int]
    targets: list[int]
    engine: str
    seed: int
    certified: bool = True
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def wiring(self) -> PartialTransversalCX:
        return PartialTransversalCX(tuple(zip(self.controls, self.targets)))

    def circuit(self) -> VerifiedPrepCircuit:
        return assemble(build_balanced_tree(self.w), build_balanced_tree(self.w_prime), self.wiring)

    def to_text(self) -> str:
        lines = [
            f"w: {self.w}",
            f"w_prime: {self.w_prime}",
            f"t: {self.t}",
            f"controls: {','.join(map(str, self.controls))}",
            f"targets: {','.join(map(str, self.targets))}",
            f"engine: {self.engine}",
            f"seed: {self.seed}",
            f"certified: {'true' if self.certified else 'false'}",
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Solution:
        fields: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if ":" not in line:
                raise FormatError(f"line {lineno}: expected 'key: value'")
            key, value = (s.strip() for s in line.split(":", 1))
            if key not in _KEYS:
                raise FormatError(f"line {lineno}: unknown key {key!r}")
            if key in fields:
                raise FormatError(f"line {lineno}: duplicate key {key!r}")
            fields[key] = value
        missing = [k for k in _KEYS if k not in fields]
        if missing:
            raise FormatError(f"missing keys: {', '.join(missing)}")
        try:
            w, w_prime, t, seed = (int(fields[k]) for k in ("w", "w_prime", "t", "seed"))
            controls = _int_list(fields["controls"])
            targets = _int_list(fields["targets"])
        except ValueError as exc:
            raise FormatError(f"non-integer field: {exc}") from exc
        if fields["certified"] not in ("true", "false"):
            raise FormatError("certified must be true or false")
        if len(controls) != w_prime or len(targets) != w_prime:
            raise FormatError("controls and targets must each list w_prime entries")
        if not 1 <= w_prime <= w or t < 1:
            raise FormatError("inconsistent sizes")
        return cls(w, w_prime, t, controls, targets, fields["engine"], seed, fields["certified"] == "true")

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path: str | Path) -> Solution:
        return cls.from_text(Path(path).read_text())


def _int_list(s: str) -> list[int]:
    return [int(x) for x in s.split(",")] if s else []
