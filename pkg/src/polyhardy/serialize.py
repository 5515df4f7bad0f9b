"""JSON round-trips for coefficient tensors, subspaces, and result reports.

Numbers are 64-bit binary floats serialized with Python's shortest
round-trip repr (at least 17 significant digits when needed), so a dump
followed by a load reproduces every value bit for bit.  Complex scalars
travel as [re, im] pairs.  Schema violations raise ValueError so callers
can separate "bad file" from "computation failed".
"""

from __future__ import annotations

import json
from typing import Dict

import numpy as np

from .grid import TruncationGrid
from .hardy import (
    Blaschke1D,
    HardyElement,
    InnerFunction,
    Monomial,
    RawSeries,
    TensorProduct,
)
from .subspace import ClassifyReport, DCReport, Subspace, WoldReport
from .theorems import (
    DilationReport,
    Factorization,
    FullAtTruncation,
    ModelFactor,
    SymbolSeries,
    UnitWanderingReport,
)

__all__ = [
    "ORDERING",
    "grid_to_json",
    "grid_from_json",
    "element_to_json",
    "element_from_json",
    "inner_to_json",
    "inner_from_json",
    "subspace_to_json",
    "subspace_from_json",
    "factor_to_json",
    "factor_from_json",
    "factorization_to_json",
    "symbol_series_to_json",
    "dc_report_to_json",
    "classify_report_to_json",
    "wold_report_to_json",
    "unit_wandering_report_to_json",
    "dilation_report_to_json",
    "save_json",
    "load_json",
]

ORDERING = "lex-last-fastest"


def _pair(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _unpair(p) -> complex:
    if not isinstance(p, (list, tuple)) or len(p) != 2:
        raise ValueError(f"expected a [re, im] pair, got {p!r}")
    return complex(float(p[0]), float(p[1]))


def _require(d: dict, key: str):
    if key not in d:
        raise ValueError(f"missing field {key!r}")
    return d[key]


def grid_to_json(grid: TruncationGrid) -> dict:
    return {"nvars": grid.nvars, "caps": list(grid.caps)}


def grid_from_json(d: dict) -> TruncationGrid:
    caps = tuple(int(c) for c in _require(d, "caps"))
    grid = TruncationGrid(caps)
    if "nvars" in d and int(d["nvars"]) != grid.nvars:
        raise ValueError(f"nvars {d['nvars']} does not match caps {caps}")
    return grid


def element_to_json(f: HardyElement) -> dict:
    return {
        "nvars": f.grid.nvars,
        "caps": list(f.grid.caps),
        "ordering": ORDERING,
        "re": [float(x) for x in np.real(f.coeffs)],
        "im": [float(x) for x in np.imag(f.coeffs)],
    }


def element_from_json(d: dict) -> HardyElement:
    grid = grid_from_json(d)
    if _require(d, "ordering") != ORDERING:
        raise ValueError(f"unsupported coefficient ordering {d['ordering']!r}")
    re = np.asarray(_require(d, "re"), dtype=np.float64)
    im = np.asarray(_require(d, "im"), dtype=np.float64)
    if re.shape != (grid.size,) or im.shape != (grid.size,):
        raise ValueError(
            f"coefficient arrays have {re.size}/{im.size} entries, grid needs {grid.size}"
        )
    return HardyElement(grid, re + 1j * im)


def _structure_to_json(structure) -> dict:
    if isinstance(structure, Monomial):
        return {"kind": "monomial", "k": list(structure.k)}
    if isinstance(structure, Blaschke1D):
        return {
            "kind": "blaschke",
            "var": structure.var,
            "zeros": [_pair(a) for a in structure.zeros],
        }
    if isinstance(structure, TensorProduct):
        return {"kind": "tensor", "factors": [inner_to_json(f) for f in structure.factors]}
    if isinstance(structure, RawSeries):
        return {"kind": "raw"}
    raise ValueError(f"unknown inner structure {structure!r}")


def _structure_from_json(d: dict):
    kind = _require(d, "kind")
    if kind == "monomial":
        return Monomial(tuple(int(x) for x in _require(d, "k")))
    if kind == "blaschke":
        zeros = tuple(_unpair(p) for p in _require(d, "zeros"))
        return Blaschke1D(zeros, int(d.get("var", 0)))
    if kind == "tensor":
        return TensorProduct(tuple(inner_from_json(f) for f in _require(d, "factors")))
    if kind == "raw":
        return RawSeries()
    raise ValueError(f"unknown inner structure kind {kind!r}")


def inner_to_json(theta: InnerFunction) -> dict:
    d = element_to_json(theta.element)
    d["structure"] = _structure_to_json(theta.structure)
    d["defect_bound"] = float(theta.defect_bound)
    return d


def inner_from_json(d: dict) -> InnerFunction:
    el = element_from_json(d)
    structure = _structure_from_json(_require(d, "structure"))
    return InnerFunction(el.grid, el, structure, float(_require(d, "defect_bound")))


def subspace_to_json(s: Subspace) -> dict:
    flat = np.asarray(s.basis).flatten(order="F")
    return {
        "grid": grid_to_json(s.grid),
        "dim": s.dim,
        "basis_re": [float(x) for x in np.real(flat)],
        "basis_im": [float(x) for x in np.imag(flat)],
    }


def subspace_from_json(d: dict) -> Subspace:
    grid = grid_from_json(_require(d, "grid"))
    dim = int(_require(d, "dim"))
    re = np.asarray(_require(d, "basis_re"), dtype=np.float64)
    im = np.asarray(_require(d, "basis_im"), dtype=np.float64)
    if re.size != grid.size * dim or im.size != grid.size * dim:
        raise ValueError(
            f"basis arrays have {re.size}/{im.size} entries, need {grid.size * dim}"
        )
    basis = (re + 1j * im).reshape((grid.size, dim), order="F")
    return Subspace(grid, basis)


def factor_to_json(factor) -> dict:
    if isinstance(factor, FullAtTruncation):
        return {"kind": "full"}
    if isinstance(factor, ModelFactor):
        return {"kind": "model", "zeros": [_pair(a) for a in factor.zeros]}
    raise ValueError(f"unknown factor {factor!r}")


def factor_from_json(d: dict):
    kind = _require(d, "kind")
    if kind == "full":
        return FullAtTruncation()
    if kind == "model":
        return ModelFactor(tuple(_unpair(p) for p in _require(d, "zeros")))
    raise ValueError(f"unknown factor kind {kind!r}")


def factorization_to_json(f: Factorization) -> dict:
    return {
        "split": f.split,
        "lambda": _pair(f.lam),
        "wandering_dim": f.wandering_dim,
        "theta": inner_to_json(f.theta),
        "left_zeros": [[_pair(a) for a in zs] for zs in f.left_zeros],
        "left_dims": list(f.left_dims),
        "factors": [factor_to_json(x) for x in f.factors],
        "residuals": {k: float(v) for k, v in f.residuals.items()},
        "tolerances": {k: float(v) for k, v in f.tolerances.items()},
    }


def symbol_series_to_json(ss: SymbolSeries) -> dict:
    coeffs = {}
    for k, block in sorted(ss.coeffs.items()):
        key = ",".join(str(int(x)) for x in k)
        coeffs[key] = {
            "re": np.real(block).tolist(),
            "im": np.imag(block).tolist(),
        }
    return {
        "max_degree": list(ss.grid_z.caps),
        "wandering_dim": ss.wandering_dim,
        "coeffs": coeffs,
    }


def dc_report_to_json(r: DCReport) -> dict:
    pairs = {}
    for (i, j), (plain, star) in sorted(r.pair_norms.items()):
        pairs[f"{i},{j}"] = [float(plain), float(star)]
    return {
        "pair_norms": pairs,
        "max_commutator": float(r.max_commutator),
        "tolerance": float(r.tolerance),
        "is_doubly_commuting": bool(r.is_doubly_commuting),
    }


def classify_report_to_json(r: ClassifyReport) -> dict:
    return {
        "verdict": r.verdict,
        "split": r.split,
        "forward_residuals": [float(x) for x in r.forward_residuals],
        "backward_residuals": [float(x) for x in r.backward_residuals],
        "interior_dims": [int(x) for x in r.interior_dims],
        "dc": dc_report_to_json(r.dc),
        "tolerance": float(r.tolerance),
    }


def wold_report_to_json(r: WoldReport) -> dict:
    tiles = {",".join(str(int(x)) for x in k): int(v) for k, v in sorted(r.tile_dims.items())}
    return {
        "wandering_dim": int(r.wandering_dim),
        "tile_dims": tiles,
        "total": int(r.total),
        "expected": int(r.expected),
        "orthogonality_residual": float(r.orthogonality_residual),
        "tolerance": float(r.tolerance),
        "passed": bool(r.passed),
    }


def unit_wandering_report_to_json(r: UnitWanderingReport) -> dict:
    return {
        "wandering_dim": int(r.wandering_dim),
        "sampled_deviation": float(r.sampled_deviation),
        "tail_bound": float(r.tail_bound),
        "samples": int(r.samples),
        "psi": _pair(r.psi),
        "verdict": r.verdict,
        "invariance_residual": float(r.invariance_residual),
    }


def dilation_report_to_json(r: DilationReport) -> dict:
    return {
        "grid": grid_to_json(r.grid),
        "intertwining_residuals": [float(x) for x in r.intertwining_residuals],
        "isometry_defects": [float(x) for x in r.isometry_defects],
        "dc": dc_report_to_json(r.dc),
    }


def save_json(path, obj: Dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
