from __future__ import annotations

import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.polysys import Homotopy

Pair = Tuple[float, float]


class Term(BaseModel):
    model_config = ConfigDict(allow_inf_nan=False)

    coeff_re: float
    coeff_im: float = 0.0
    exponents: List[int]
    t_degree: int = Field(0, ge=0)

    @property
    def coefficient(self) -> complex:
        return complex(self.coeff_re, self.coeff_im)


class SystemDocument(BaseModel):
    """
    A square system (no t_degree anywhere) or an explicit homotopy
    (some term carries t_degree > 0, starts required for solving).
    """

    model_config = ConfigDict(allow_inf_nan=False)

    variables: List[str]
    polynomials: List[List[Term]]
    toric: bool = False
    starts: Optional[List[List[Pair]]] = None

    @model_validator(mode="after")
    def _validate_and_merge(self) -> "SystemDocument":
        n = len(self.variables)
        if n == 0:
            raise ValueError("at least one variable is required")
        if len(set(self.variables)) != n:
            raise ValueError("variable names must be unique")
        if len(self.polynomials) != n:
            raise ValueError(f"system is not square: {len(self.polynomials)} polynomials in {n} variables")
        merged: List[List[Term]] = []
        for i, poly in enumerate(self.polynomials):
            by_key: Dict[Tuple[Tuple[int, ...], int], Term] = {}
            for term in poly:
                if len(term.exponents) != n:
                    raise ValueError(
                        f"polynomial {i}: exponent vector of length {len(term.exponents)} for {n} variables"
                    )
                if not self.toric and min(term.exponents) < 0:
                    raise ValueError(f"polynomial {i}: negative exponents need \"toric\": true")
                key = (tuple(term.exponents), term.t_degree)
                if key in by_key:
                    prev = by_key[key]
                    by_key[key] = prev.model_copy(
                        update={"coeff_re": prev.coeff_re + term.coeff_re, "coeff_im": prev.coeff_im + term.coeff_im}
                    )
                else:
                    by_key[key] = term
            merged.append(list(by_key.values()))
        self.polynomials = merged
        if self.starts is not None:
            for s in self.starts:
                if len(s) != n:
                    raise ValueError(f"start point with {len(s)} coordinates for {n} variables")
        return self

    @property
    def is_homotopy(self) -> bool:
        return any(term.t_degree > 0 for poly in self.polynomials for term in poly)

    def to_homotopy(self) -> Homotopy:
        n = len(self.variables)
        return Homotopy.from_terms(
            n,
            [[(term.coefficient, term.exponents, term.t_degree) for term in poly] for poly in self.polynomials],
            toric=self.toric,
        )

    def start_points(self) -> List[np.ndarray]:
        return [np.array([complex(re, im) for re, im in s], dtype=complex) for s in self.starts or []]

    @classmethod
    def from_homotopy(cls, H: Homotopy, variables: Optional[List[str]] = None) -> "SystemDocument":
        names = variables or [f"x{i + 1}" for i in range(H.n)]
        polys = [
            [
                Term(
                    coeff_re=m.coefficient.real,
                    coeff_im=m.coefficient.imag,
                    exponents=list(m.x_exponents),
                    t_degree=m.t_degree,
                )
                for m in p.monomials
            ]
            for p in H.polys
        ]
        return cls(variables=names, polynomials=polys, toric=H.toric)


def _finite(v: float) -> Optional[float]:
    return v if math.isfinite(v) else None


def pair(z: complex) -> Pair:
    return (float(z.real), float(z.imag))


class PathRecord(BaseModel):
    index: int
    status: str
    endpoint: List[Pair]
    residual: Optional[float] = None
    steps: int
    min_dt: Optional[float] = None
    max_dt: Optional[float] = None
    dt1_fraction: float
    halvings: int = 0

    @classmethod
    def from_result(cls, index: int, result: Any) -> "PathRecord":
        return cls(
            index=index,
            status=result.status.value,
            endpoint=[pair(z) for z in result.endpoint],
            residual=_finite(result.residual),
            steps=result.steps,
            min_dt=_finite(result.min_dt) if result.steps else None,
            max_dt=result.max_dt if result.steps else None,
            dt1_fraction=result.dt1_fraction,
            halvings=result.halvings,
        )


class SolutionDocument(BaseModel):
    paths: List[PathRecord]
    gamma: Optional[Pair] = None
    seed: Optional[int] = None
    config: Dict[str, Any]
    summary: Dict[str, int]
    wall_time: float

    @property
    def all_succeeded(self) -> bool:
        return all(p.status == "success" for p in self.paths)


class ExperimentReport(BaseModel):
    experiment: str
    parameters: Dict[str, Any]
    columns: List[str]
    rows: List[Dict[str, Any]]
    summary: Dict[str, Any] = {}


class SolveRequest(BaseModel):
    system: SystemDocument
    config: Dict[str, Any] = {}
    seed: Optional[int] = None
    workers: int = Field(1, ge=1)


class SolveResponse(BaseModel):
    run_id: str
    solution: SolutionDocument
