"""Cyclic layer patterns over the species A, B, C.

A pattern is stored as a plain string such as ``"ABAC"`` and read cyclically:
the last layer touches the first.  Species labels are never permuted when
canonicalizing, because volume fractions and tensions distinguish them.
"""
from __future__ import annotations

import numpy as np

SPECIES = "ABC"
MAX_ENUM_LEN = 24


class InvalidPattern(ValueError):
    """Pattern rejected; ``reason`` is a short machine-readable tag."""

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


def _as_string(layers) -> str:
    if isinstance(layers, str):
        s = layers.strip().upper()
    else:
        parts = []
        for x in layers:
            if isinstance(x, (int, np.integer)):
                if not 0 <= int(x) <= 2:
                    raise InvalidPattern("bad-label", f"species index {x} not in 0..2")
                parts.append(SPECIES[int(x)])
            else:
                parts.append(str(x).upper())
        s = "".join(parts)
    bad = set(s) - set(SPECIES)
    if bad:
        raise InvalidPattern("bad-label", f"unknown species labels {sorted(bad)}")
    return s


def validate(layers) -> str:
    """Return the pattern as a string, or raise :class:`InvalidPattern`.

    Accepts a string, a sequence of labels, or a sequence of indices 0..2.
    """
    s = _as_string(layers)
    if len(s) < 3:
        raise InvalidPattern("too-short", f"pattern {s!r} has length {len(s)} < 3")
    for k in range(len(s)):
        if s[k] == s[k - 1]:
            raise InvalidPattern(
                "adjacent-duplicate",
                f"pattern {s!r}: adjacent duplicate {s[k]!r} at layers {(k - 1) % len(s)},{k}",
            )
    missing = [x for x in SPECIES if x not in s]
    if missing:
        raise InvalidPattern("missing-species",
                             f"pattern {s!r}: species {''.join(missing)} missing")
    return s


def labels(pattern: str) -> np.ndarray:
    """Species indices (0, 1, 2) of each layer."""
    return np.array([SPECIES.index(x) for x in pattern], dtype=np.intp)


def _min_rotation(s: str, first: str) -> str:
    n = len(s)
    s2 = s + s
    return min(s2[i:i + n] for i in range(n) if s[i] == first)


def canonicalize(pattern: str) -> str:
    """Lexicographically least image under rotation and reflection."""
    first = min(pattern)
    return min(_min_rotation(pattern, first), _min_rotation(pattern[::-1], first))


def is_canonical(pattern: str) -> bool:
    return canonicalize(pattern) == pattern


def images(pattern: str) -> list[str]:
    """All rotations and reflected rotations (with repeats)."""
    n = len(pattern)
    out = []
    for s in (pattern, pattern[::-1]):
        out.extend(s[i:] + s[:i] for i in range(n))
    return out


def symmetry_orbits(pattern: str) -> list[list[int]]:
    """Layer-index orbits under label-preserving rotations and reflections.

    Layers in one orbit are forced to share a width by the symmetry of the
    pattern.  Returned orbits are sorted by their smallest index.
    """
    n = len(pattern)
    maps = []
    for r in range(n):
        maps.append([(k + r) % n for k in range(n)])
        maps.append([(r - k) % n for k in range(n)])
    autos = [m for m in maps if all(pattern[m[k]] == pattern[k] for k in range(n))]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for m in autos:
        for k in range(n):
            a, b = find(k), find(m[k])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for k in range(n):
        groups.setdefault(find(k), []).append(k)
    return sorted(groups.values(), key=lambda g: g[0])


def _walk(length: int, prefix: list[str], out: list[str]) -> None:
    if len(prefix) == length:
        if prefix[-1] != prefix[0] and "B" in prefix and "C" in prefix:
            s = "".join(prefix)
            if is_canonical(s):
                out.append(s)
        return
    last = prefix[-1]
    for x in SPECIES:
        if x != last:
            prefix.append(x)
            _walk(length, prefix, out)
            prefix.pop()


def patterns_of_length(length: int) -> list[str]:
    """Canonical valid patterns of exactly ``length`` layers, sorted."""
    if length < 3:
        return []
    out: list[str] = []
    # every canonical pattern starts with A (it contains A and A is least)
    _walk(length, ["A"], out)
    out.sort()
    return out


def enumerate_patterns(max_len: int) -> list[str]:
    """All canonical patterns of length 3..max_len, by length then lexicographically."""
    if not 3 <= max_len <= MAX_ENUM_LEN:
        raise InvalidPattern("cap-exceeded",
                             f"max_len must lie in 3..{MAX_ENUM_LEN}, got {max_len}")
    out: list[str] = []
    for length in range(3, max_len + 1):
        out.extend(patterns_of_length(length))
    return out


def repeat(pattern: str, n: int) -> str:
    """Concatenate ``n`` copies of a seam-valid pattern."""
    if n < 1:
        raise ValueError(f"repeat count must be >= 1, got {n}")
    return validate(pattern * n)


def merge_degenerate(pattern: str, widths, tol: float) -> tuple[str, np.ndarray]:
    """Drop layers thinner than ``tol`` and fuse the neighbours they separated.

    Returns the merged (not canonicalized) pattern string and its widths.  The
    dropped widths are discarded, so the merged widths sum to slightly less than
    one when any layer is dropped.
    """
    w = np.asarray(widths, dtype=float)
    keep = [(pattern[k], w[k]) for k in range(len(pattern)) if w[k] >= tol]
    merged: list[list] = []
    for s, x in keep:
        if merged and merged[-1][0] == s:
            merged[-1][1] += x
        else:
            merged.append([s, x])
    if len(merged) > 1 and merged[0][0] == merged[-1][0]:
        merged[0][1] += merged[-1][1]
        merged.pop()
    return "".join(s for s, _ in merged), np.array([x for _, x in merged])
