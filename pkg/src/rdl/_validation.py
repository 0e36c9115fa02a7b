"""Argument checks shared by the public entry points."""

from __future__ import annotations

from typing import Iterable

from rdl.errors import OutOfDomainError


def check_modulus(r: int) -> int:
    if r < 1:
        raise ValueError(f"modulus must be >= 1, got {r}")
    return r


def check_vertex_set(vertices: Iterable[int]) -> tuple[int, ...]:
    """Sorted tuple of distinct positive vertices; raises on empty or invalid input."""
    vs = sorted(set(int(v) for v in vertices))
    if not vs:
        raise ValueError("vertex set must be non-empty")
    if vs[0] < 1:
        raise OutOfDomainError(f"vertices must be positive, got {vs[0]}")
    return tuple(vs)


def check_colour(view, colour: int) -> int:
    if not 1 <= colour <= view.colour_count:
        raise ValueError(f"colour {colour} outside [1..{view.colour_count}]")
    return colour


def check_in_view(view, vertices: Iterable[int]) -> None:
    for v in vertices:
        if v not in view:
            raise OutOfDomainError(f"vertex {v} not in view")
