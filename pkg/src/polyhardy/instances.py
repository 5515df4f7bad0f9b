"""Seeded random data for round-trip experiments.

Only data generation lives here (zeros, symbols, factor plans); the checks
that consume the data stay in the library and the test suite.  Everything
is driven by an explicit numpy Generator so runs are reproducible.
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from .errors import DomainError
from .grid import TruncationGrid
from .hardy import HardyElement, InnerFunction, inner_blaschke, inner_tensor
from .theorems import FullAtTruncation, ModelFactor

__all__ = [
    "draw_zeros",
    "draw_unimodular",
    "draw_polynomial",
    "draw_blaschke_symbol",
    "draw_factors",
]


def draw_zeros(
    rng: np.random.Generator,
    count: int,
    modulus_min: float = 0.1,
    modulus_max: float = 0.6,
    separation: float = 0.0,
    max_tries: int = 2000,
) -> tuple:
    """Zeros in an annulus, pairwise separated by at least `separation`."""
    zeros: list = []
    for _ in range(count):
        for _attempt in range(max_tries):
            rad = rng.uniform(modulus_min, modulus_max)
            ang = rng.uniform(0.0, 2.0 * np.pi)
            z = complex(rad * np.cos(ang), rad * np.sin(ang))
            if all(abs(z - w) >= separation for w in zeros):
                zeros.append(z)
                break
        else:
            raise DomainError(
                f"could not place {count} zeros with separation {separation}"
            )
    return tuple(zeros)


def draw_unimodular(rng: np.random.Generator) -> complex:
    ang = rng.uniform(0.0, 2.0 * np.pi)
    return complex(np.cos(ang), np.sin(ang))


def draw_polynomial(rng: np.random.Generator, grid: TruncationGrid) -> HardyElement:
    """Unit-norm element with iid complex Gaussian coefficients."""
    c = rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size)
    return HardyElement(grid, c / np.linalg.norm(c))


def draw_blaschke_symbol(
    rng: np.random.Generator,
    caps: Sequence[int],
    counts: Sequence[int],
    modulus_max: float,
    modulus_min: float = 0.1,
    separation: float = 0.15,
) -> InnerFunction:
    """Tensor product of per-variable random Blaschke truncations."""
    if len(caps) != len(counts):
        raise DomainError("need one zero count per symbol variable")
    factors = [
        inner_blaschke(
            draw_zeros(rng, int(c), modulus_min, modulus_max, separation), int(cap)
        )
        for c, cap in zip(counts, caps)
    ]
    return inner_tensor(factors)


def draw_factors(
    rng: np.random.Generator,
    plan: Sequence[Union[int, str]],
    modulus_max: float,
    modulus_min: float = 0.1,
    separation: float = 0.15,
) -> tuple:
    """Backward-block factors from a plan of zero counts or the token "full"."""
    out = []
    for p in plan:
        if p == "full":
            out.append(FullAtTruncation())
        else:
            out.append(
                ModelFactor(
                    draw_zeros(rng, int(p), modulus_min, modulus_max, separation)
                )
            )
    return tuple(out)
