"""Tables of nontrivial zeta zeros on the critical line."""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import OrderError, ParseError, SanityError
from .specialfn import PrecisionProfile, zeta_derivative

FIRST_ZERO = 14.134725141734693
ZERO_DERIV_RADIUS = 0.1


@dataclass(frozen=True)
class ZeroTable:
    """Ordinates ``beta`` of zeros ``1/2 + i beta`` with ``zeta'`` at each."""

    betas: tuple[float, ...]
    zeta_prime: tuple[complex, ...]

    @property
    def count(self) -> int:
        return len(self.betas)

    def truncated(self, count: int) -> "ZeroTable":
        if not 1 <= count <= self.count:
            raise ValueError(f"count must lie in 1..{self.count}")
        return ZeroTable(self.betas[:count], self.zeta_prime[:count])


def parse_zero_lines(lines) -> list[float]:
    """Parse one decimal per line; blank lines and ``#`` comments are skipped."""
    betas = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        try:
            value = float(text)
        except ValueError:
            raise ParseError(f"not a number: {text!r}", lineno) from None
        if not math.isfinite(value) or value <= 0:
            raise ParseError(f"zero ordinate must be positive and finite, got {text}", lineno)
        if betas and value <= betas[-1]:
            raise OrderError(f"line {lineno}: {value} does not exceed the previous entry {betas[-1]}")
        betas.append(value)
    if not betas:
        raise ParseError("no zero ordinates found")
    if abs(betas[0] - FIRST_ZERO) > 1e-3:
        raise SanityError(f"first ordinate {betas[0]} is not the first zero {FIRST_ZERO:.4f}")
    return betas


def build_table(betas, profile: PrecisionProfile | None = None) -> ZeroTable:
    profile = profile or PrecisionProfile(deriv_radius=ZERO_DERIV_RADIUS)
    derivs = []
    for b in betas:
        d = zeta_derivative(0.5 + 1j * b, 1, profile)
        if abs(d) == 0 or not np.isfinite(d):
            raise SanityError(f"zeta'(1/2 + {b}i) vanished; zero is not simple at this accuracy")
        derivs.append(d)
    return ZeroTable(tuple(float(b) for b in betas), tuple(derivs))


def load_zero_file(path, count: int | None = None,
                   profile: PrecisionProfile | None = None) -> ZeroTable:
    """Read, validate and complete a zero file.  ``count`` keeps the first entries."""
    text = Path(path).read_text(encoding="utf-8")
    betas = parse_zero_lines(text.splitlines())
    if count is not None:
        if count > len(betas):
            raise ParseError(f"file holds {len(betas)} zeros, {count} requested")
        betas = betas[:count]
    return build_table(betas, profile)


def bundled_zero_path() -> Path:
    return Path(str(resources.files("zetafourier") / "data" / "zeros100.txt"))


_BUNDLED: dict[int, ZeroTable] = {}


def bundled_zeros(count: int = 100) -> ZeroTable:
    """The shipped table of the first 100 zeros (cached per count)."""
    if count not in _BUNDLED:
        full = _BUNDLED.get(100) or load_zero_file(bundled_zero_path())
        _BUNDLED[100] = full
        _BUNDLED[count] = full.truncated(count)
    return _BUNDLED[count]
