"""Additive stream cipher keyed by chaotic trajectories.

Each symbol is mapped to a code ``p`` and masked as ``c = (p + k) mod m``.
Keys come from an explicit list, a seeded PRNG, or the third component of a
synchronized trajectory quantised as ``floor(|z| * scale)``. This is a
teaching cipher with no security claims.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np

from .errors import DecodingError, DomainError, EncodingError, KeyExhaustionError

__all__ = [
    "CODECS",
    "AlphabetCodec",
    "CipherSession",
    "ExchangeResult",
    "ExplicitKeys",
    "KeyAgreementReport",
    "SeededKeys",
    "TrajectoryKeys",
    "compare_keystreams",
    "decrypt",
    "derive_keys_from_trajectory",
    "encrypt",
    "get_codec",
    "secure_exchange",
]

DEFAULT_SCALE = 10**6


def _alnum_lower(text: str) -> str:
    return "".join(ch for ch in text.lower() if ch.isascii() and ch.isalnum())


@dataclass(frozen=True)
class AlphabetCodec:
    name: str
    table: Mapping[str, int]
    normalize: Callable[[str], str] = field(default=_alnum_lower, repr=False)

    def __post_init__(self):
        codes = list(self.table.values())
        if len(set(codes)) != len(codes):
            raise ValueError(f"codec {self.name} is not injective")
        object.__setattr__(self, "_inverse", {c: s for s, c in self.table.items()})

    @property
    def modulus(self) -> int:
        return len(self.table)

    @property
    def symbols(self) -> str:
        return "".join(sorted(self.table, key=self.table.get))

    def encode(self, text: str) -> List[int]:
        """Normalize ``text`` then map each symbol to its code."""
        out = []
        for pos, ch in enumerate(self.normalize(text)):
            try:
                out.append(self.table[ch])
            except KeyError:
                raise EncodingError(
                    f"symbol {ch!r} at position {pos} is not in the {self.name} alphabet"
                ) from None
        return out

    def decode(self, codes: Sequence[int]) -> str:
        chars = []
        for pos, c in enumerate(codes):
            try:
                chars.append(self._inverse[int(c)])
            except (KeyError, ValueError, TypeError):
                raise DecodingError(
                    f"code {c!r} at position {pos} is outside 0..{self.modulus - 1}"
                ) from None
        return "".join(chars)


def _paper36_table() -> Dict[str, int]:
    table = {d: i for i, d in enumerate(string.digits)}
    # a->11 ... y->35 leaves 10 free; 'z' takes it
    table.update({ch: 11 + i for i, ch in enumerate(string.ascii_lowercase[:25])})
    table["z"] = 10
    return table


def _base36_table() -> Dict[str, int]:
    return {ch: i for i, ch in enumerate(string.digits + string.ascii_lowercase)}


CODECS: Dict[str, AlphabetCodec] = {
    "paper36": AlphabetCodec("paper36", _paper36_table()),
    "base36": AlphabetCodec("base36", _base36_table()),
    "ascii128": AlphabetCodec("ascii128", {chr(i): i for i in range(128)}, normalize=str),
}


def get_codec(name: str) -> AlphabetCodec:
    try:
        return CODECS[name]
    except KeyError:
        raise DomainError(f"unknown codec {name!r}; choose from {', '.join(CODECS)}") from None


# --- key sources -------------------------------------------------------------


@dataclass(frozen=True)
class ExplicitKeys:
    keys: Sequence[int]

    def __post_init__(self):
        keys = tuple(int(k) for k in self.keys)
        if any(k < 0 for k in keys):
            raise DomainError("keys must be non-negative integers")
        object.__setattr__(self, "keys", keys)

    def take(self, count: int) -> List[int]:
        if count > len(self.keys):
            raise KeyExhaustionError(f"need {count} keys but only {len(self.keys)} available")
        return list(self.keys[:count])


@dataclass(frozen=True)
class SeededKeys:
    """Uniform keys in ``[0, high)`` from a seeded generator (seed: 64-bit unsigned)."""

    seed: int
    high: int = 2**32

    def take(self, count: int) -> List[int]:
        rng = np.random.default_rng(int(self.seed))
        return [int(k) for k in rng.integers(0, self.high, size=count)]


def derive_keys_from_trajectory(
    z_series: Sequence[float], t0_index: int, count: int, scale: float = DEFAULT_SCALE
) -> List[int]:
    """``k_i = floor(|z[t0_index + i]| * scale)`` for ``i = 1..count``.

    Only samples strictly after ``t0_index`` are used.
    """
    z = np.asarray(z_series, dtype=float)
    if t0_index < 0 or count < 0:
        raise DomainError("t0_index and count must be non-negative")
    if t0_index + count >= z.size:
        raise DomainError(
            f"series of length {z.size} is too short for {count} keys after index {t0_index}"
        )
    window = np.abs(z[t0_index + 1 : t0_index + count + 1])
    if not np.all(np.isfinite(window)):
        raise DomainError("z series contains non-finite samples")
    return [int(math.floor(v * scale)) for v in window]


@dataclass(frozen=True)
class TrajectoryKeys:
    z_series: Sequence[float]
    t0_index: int
    scale: float = DEFAULT_SCALE

    def take(self, count: int) -> List[int]:
        z = np.asarray(self.z_series, dtype=float)
        available = max(0, z.size - 1 - self.t0_index)
        if count > available:
            raise KeyExhaustionError(
                f"need {count} keys but the trajectory has only {available} samples after t0"
            )
        return derive_keys_from_trajectory(z, self.t0_index, count, self.scale)


# --- session -------------------------------------------------------------------


@dataclass(frozen=True)
class CipherSession:
    """Codec plus key source. Every call draws keys from the start of the stream."""

    codec: AlphabetCodec
    keys: object

    def encrypt(self, plaintext: str) -> List[int]:
        codes = self.codec.encode(plaintext)
        m = self.codec.modulus
        return [(p + k) % m for p, k in zip(codes, self.keys.take(len(codes)))]

    def decrypt(self, ciphertext: Sequence[int]) -> str:
        m = self.codec.modulus
        codes = [int(c) for c in ciphertext]
        for pos, c in enumerate(codes):
            if not 0 <= c < m:
                raise DecodingError(f"code {c} at position {pos} is outside 0..{m - 1}")
        keys = self.keys.take(len(codes))
        return self.codec.decode([(c - k) % m for c, k in zip(codes, keys)])


def encrypt(session: CipherSession, plaintext: str) -> List[int]:
    return session.encrypt(plaintext)


def decrypt(session: CipherSession, ciphertext: Sequence[int]) -> str:
    return session.decrypt(ciphertext)


# --- synchronized key agreement ------------------------------------------------


@dataclass(frozen=True)
class KeyAgreementReport:
    sender_keys: List[int]
    receiver_keys: List[int]
    mismatches: List[int]
    margins: List[float]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def compare_keystreams(
    z_sender, z_receiver, t0_index: int, count: int, scale: float = DEFAULT_SCALE
) -> KeyAgreementReport:
    """Derive both keystreams and report positions where they disagree.

    ``margins[i]`` is the distance of the receiver's scaled sample from the
    nearest quantisation boundary minus the scaled sender/receiver gap; a
    negative margin means the two floors can differ.
    """
    ks = derive_keys_from_trajectory(z_sender, t0_index, count, scale)
    kr = derive_keys_from_trajectory(z_receiver, t0_index, count, scale)
    zs = np.abs(np.asarray(z_sender, dtype=float)[t0_index + 1 : t0_index + count + 1]) * scale
    zr = np.abs(np.asarray(z_receiver, dtype=float)[t0_index + 1 : t0_index + count + 1]) * scale
    frac = zr - np.floor(zr)
    margins = (np.minimum(frac, 1.0 - frac) - np.abs(zs - zr)).tolist()
    mismatches = [i for i, (a, b) in enumerate(zip(ks, kr)) if a != b]
    return KeyAgreementReport(ks, kr, mismatches, margins)


@dataclass(frozen=True)
class ExchangeResult:
    plaintext: str
    ciphertext: List[int]
    recovered: str
    report: KeyAgreementReport

    @property
    def ok(self) -> bool:
        return self.report.ok

    @property
    def violations(self) -> List[int]:
        return self.report.mismatches


def secure_exchange(
    message: str,
    z_sender,
    z_receiver,
    t0_index: int,
    codec: str = "paper36",
    scale: float = DEFAULT_SCALE,
) -> ExchangeResult:
    """Sender encrypts with keys from ``z_sender``; receiver decrypts with ``z_receiver``.

    Positions whose keys disagree are listed in ``result.violations``; the
    recovered text is exact whenever that list is empty.
    """
    c = get_codec(codec)
    plain = c.normalize(message)
    n = len(plain)
    sender = CipherSession(c, TrajectoryKeys(z_sender, t0_index, scale))
    receiver = CipherSession(c, TrajectoryKeys(z_receiver, t0_index, scale))
    ciphertext = sender.encrypt(plain)
    recovered = receiver.decrypt(ciphertext)
    report = compare_keystreams(z_sender, z_receiver, t0_index, n, scale)
    return ExchangeResult(plain, ciphertext, recovered, report)
