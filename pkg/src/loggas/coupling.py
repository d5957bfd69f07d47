"""Coupling matrices, charge vectors and the JSON input format.

All indices are 0-based in the API; reports render 1-based labels.  Exact
rational entries (Fractions) are kept alongside the float matrix whenever the
input was given as integer/ratio literals; float inputs never promote.
Random sampling uses numpy's Philox counter-based generator with an explicit
seed, never the global RNG.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import (
    AsymmetricInput,
    InputFormatError,
    NonzeroDiagonal,
    NotNeutral,
    TooSmall,
    ZeroCharge,
)
from .rational import Real, all_exact, is_exact, parse_number

SYMMETRY_RTOL = 1e-12
NEUTRALITY_RTOL = 1e-12


@dataclass(frozen=True)
class CouplingMatrix:
    """Symmetric n x n coupling data with zero diagonal.

    ``entries`` is a read-only float array; ``exact_entries`` is a parallel
    Fraction grid, present iff every input entry was exactly rational.
    """

    n: int
    entries: np.ndarray
    exact_entries: Optional[tuple] = None

    def __post_init__(self):
        if self.n < 2:
            raise TooSmall(f"need at least 2 particles, got n={self.n}")
        self.entries.setflags(write=False)

    @property
    def is_exact(self) -> bool:
        return self.exact_entries is not None

    def value(self, i: int, j: int) -> Real:
        """Single coupling c(i,j), exact when available."""
        if self.exact_entries is not None:
            return self.exact_entries[i][j]
        return float(self.entries[i, j])

    def negated(self) -> "CouplingMatrix":
        exact = None
        if self.exact_entries is not None:
            exact = tuple(tuple(-q for q in row) for row in self.exact_entries)
        return CouplingMatrix(self.n, -self.entries, exact)

    def scaled(self, t: Real) -> "CouplingMatrix":
        exact = None
        if self.exact_entries is not None and is_exact(t):
            tq = Fraction(t)
            exact = tuple(tuple(tq * q for q in row) for row in self.exact_entries)
        return CouplingMatrix(self.n, self.entries * float(t), exact)

    def permuted(self, perm: Sequence[int]) -> "CouplingMatrix":
        """Relabel particles: new index i holds old particle perm[i]."""
        idx = np.asarray(perm)
        entries = self.entries[np.ix_(idx, idx)].copy()
        exact = None
        if self.exact_entries is not None:
            exact = tuple(
                tuple(self.exact_entries[perm[i]][perm[j]] for j in range(self.n))
                for i in range(self.n)
            )
        return CouplingMatrix(self.n, entries, exact)


@dataclass(frozen=True)
class ChargeVector:
    """Nonzero particle charges (vorticities)."""

    values: tuple

    def __post_init__(self):
        if len(self.values) < 2:
            raise TooSmall("need at least 2 charges")
        for i, k in enumerate(self.values):
            if k == 0:
                raise ZeroCharge(f"charge k[{i}] is zero")

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def is_exact(self) -> bool:
        return all_exact(self.values)

    def as_floats(self) -> np.ndarray:
        return np.array([float(k) for k in self.values], dtype=float)


@dataclass(frozen=True)
class TwoComponentSpec:
    """Two species: n1 particles of charge +z1, n2 of charge -z2."""

    n1: int
    n2: int
    z1: Real
    z2: Real

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise TooSmall("need n1 >= 1 and n2 >= 1")
        if not (self.z1 > 0 and self.z2 > 0):
            raise ZeroCharge("charge magnitudes must be positive")

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def is_exact(self) -> bool:
        return all_exact((self.z1, self.z2))

    @property
    def is_neutral(self) -> bool:
        a, b = self.n1 * self.z1, self.n2 * self.z2
        if is_exact(a) and is_exact(b):
            return a == b
        a, b = float(a), float(b)
        return abs(a - b) <= NEUTRALITY_RTOL * max(abs(a), abs(b))

    def charges(self) -> ChargeVector:
        return ChargeVector(tuple([self.z1] * self.n1 + [-self.z2] * self.n2))


@dataclass(frozen=True)
class GraphSpec:
    """Undirected simple graph: vertex count and 0-based edge list."""

    n: int
    edges: tuple

    def __post_init__(self):
        if self.n < 2:
            raise TooSmall("need at least 2 vertices")
        seen = set()
        for e in self.edges:
            if len(e) != 2:
                raise InputFormatError(f"edge {e!r} is not a pair")
            i, j = e
            if not (0 <= i < j < self.n):
                raise InputFormatError(f"edge ({i},{j}) violates 0 <= i < j < n")
            if (i, j) in seen:
                raise InputFormatError(f"duplicate edge ({i},{j})")
            seen.add((i, j))


def _validated(n: int, floats: np.ndarray, exact) -> CouplingMatrix:
    return CouplingMatrix(n=n, entries=floats, exact_entries=exact)


def from_matrix(raw) -> CouplingMatrix:
    """Validate a square array of couplings.

    Symmetry is checked (within 1e-12 relative), never repaired by averaging;
    the stored matrix mirrors the upper triangle.  Integer/Fraction/"p/q"
    entries produce an exact rational grid alongside the floats.
    """
    if isinstance(raw, np.ndarray):
        rows = [[raw[i, j] for j in range(raw.shape[1])] for i in range(raw.shape[0])]
    else:
        rows = [list(r) for r in raw]
    n = len(rows)
    if n < 2:
        raise TooSmall(f"need at least 2 particles, got n={n}")
    if any(len(r) != n for r in rows):
        raise InputFormatError("matrix is not square")

    parsed = [[parse_number(v) for v in r] for r in rows]
    for i in range(n):
        if parsed[i][i] != 0:
            raise NonzeroDiagonal(f"entry ({i},{i}) = {parsed[i][i]} is nonzero")
        for j in range(i + 1, n):
            a, b = float(parsed[i][j]), float(parsed[j][i])
            if abs(a - b) > SYMMETRY_RTOL * max(1.0, abs(a)):
                raise AsymmetricInput(f"entries ({i},{j}) and ({j},{i}) differ: {a} vs {b}")

    exact_mode = all(all_exact(r) for r in parsed)
    floats = np.zeros((n, n), dtype=float)
    exact = [[Fraction(0)] * n for _ in range(n)] if exact_mode else None
    for i in range(n):
        for j in range(i + 1, n):
            v = parsed[i][j]
            floats[i, j] = floats[j, i] = float(v)
            if exact is not None:
                exact[i][j] = exact[j][i] = Fraction(v)
    if exact is not None:
        exact = tuple(tuple(r) for r in exact)
    return _validated(n, floats, exact)


def from_charges(k: ChargeVector) -> CouplingMatrix:
    """Coupling c(i,j) = k_i * k_j off the diagonal."""
    n = k.n
    kf = k.as_floats()
    floats = np.outer(kf, kf)
    np.fill_diagonal(floats, 0.0)
    exact = None
    if k.is_exact:
        kq = [Fraction(v) for v in k.values]
        exact = tuple(
            tuple(kq[i] * kq[j] if i != j else Fraction(0) for j in range(n))
            for i in range(n)
        )
        # keep floats bit-identical to the exact products
        for i in range(n):
            for j in range(n):
                if i != j:
                    floats[i, j] = float(exact[i][j])
    return _validated(n, floats, exact)


def from_two_component(spec: TwoComponentSpec) -> CouplingMatrix:
    """Block couplings: z1^2 within species 1, z2^2 within species 2,
    -z1*z2 across.  Identical to from_charges on (z1,..,-z2,..)."""
    return from_charges(spec.charges())


def from_graph(g: GraphSpec) -> CouplingMatrix:
    """Adjacency matrix as couplings: 1 on edges, 0 elsewhere (exact)."""
    floats = np.zeros((g.n, g.n), dtype=float)
    exact = [[Fraction(0)] * g.n for _ in range(g.n)]
    for i, j in g.edges:
        floats[i, j] = floats[j, i] = 1.0
        exact[i][j] = exact[j][i] = Fraction(1)
    return _validated(g.n, floats, tuple(tuple(r) for r in exact))


def _philox(seed: int) -> np.random.Generator:
    # Philox: explicit counter-based generator, reproducible across runs.
    return np.random.Generator(np.random.Philox(seed))


def sample_gaussian_couplings(n: int, variance: float, seed: int) -> CouplingMatrix:
    """i.i.d. normal off-diagonal couplings, mean 0 and the given variance."""
    if n < 2:
        raise TooSmall(f"need n >= 2, got {n}")
    if not variance > 0:
        raise ValueError("variance must be positive")
    rng = _philox(seed)
    draws = rng.standard_normal(n * (n - 1) // 2) * float(np.sqrt(variance))
    floats = np.zeros((n, n), dtype=float)
    iu = np.triu_indices(n, k=1)
    floats[iu] = draws
    floats = floats + floats.T
    return _validated(n, floats, None)


def sample_gaussian_charges(n: int, seed: int) -> ChargeVector:
    """n i.i.d. standard normal charges; exact-zero draws are resampled."""
    if n < 2:
        raise TooSmall(f"need n >= 2, got {n}")
    rng = _philox(seed)
    k = rng.standard_normal(n)
    while np.any(k == 0.0):  # probability-zero event, guards exact zeros
        zeros = k == 0.0
        k[zeros] = rng.standard_normal(int(np.sum(zeros)))
    return ChargeVector(tuple(float(v) for v in k))


# ---------------------------------------------------------------------------
# JSON input format
# ---------------------------------------------------------------------------

_INPUT_KEYS = ("matrix", "charges", "two_component", "graph", "random")


@dataclass(frozen=True)
class SystemInput:
    """A parsed input file: the coupling matrix plus the model it came from."""

    kind: str
    coupling: CouplingMatrix
    charges: Optional[ChargeVector] = None
    two_component: Optional[TwoComponentSpec] = None
    graph: Optional[GraphSpec] = None


def _require_keys(obj: dict, allowed: set, context: str):
    unknown = set(obj) - allowed
    if unknown:
        raise InputFormatError(f"unknown keys in {context}: {sorted(unknown)}")


def parse_system(obj: dict) -> SystemInput:
    """Parse the input schema: exactly one of matrix / charges /
    two_component / graph / random.  Unknown keys are rejected."""
    if not isinstance(obj, dict):
        raise InputFormatError("input must be a JSON object")
    _require_keys(obj, set(_INPUT_KEYS), "input")
    present = [k for k in _INPUT_KEYS if k in obj]
    if len(present) != 1:
        raise InputFormatError(f"exactly one of {_INPUT_KEYS} required, got {present}")
    kind = present[0]

    if kind == "matrix":
        return SystemInput(kind, from_matrix(obj["matrix"]))

    if kind == "charges":
        k = ChargeVector(tuple(parse_number(v) for v in obj["charges"]))
        return SystemInput(kind, from_charges(k), charges=k)

    if kind == "two_component":
        tc = obj["two_component"]
        _require_keys(tc, {"n1", "n2", "z1", "z2"}, "two_component")
        for key in ("n1", "n2", "z1", "z2"):
            if key not in tc:
                raise InputFormatError(f"two_component missing {key!r}")
        if not isinstance(tc["n1"], int) or not isinstance(tc["n2"], int):
            raise InputFormatError("n1 and n2 must be integers")
        spec = TwoComponentSpec(tc["n1"], tc["n2"], parse_number(tc["z1"]), parse_number(tc["z2"]))
        return SystemInput(kind, from_two_component(spec),
                           charges=spec.charges(), two_component=spec)

    if kind == "graph":
        gobj = obj["graph"]
        _require_keys(gobj, {"n", "edges"}, "graph")
        if "n" not in gobj or "edges" not in gobj:
            raise InputFormatError("graph needs 'n' and 'edges'")
        g = GraphSpec(gobj["n"], tuple(tuple(e) for e in gobj["edges"]))
        return SystemInput(kind, from_graph(g), graph=g)

    robj = obj["random"]
    _require_keys(robj, {"model", "n", "variance", "seed"}, "random")
    model = robj.get("model")
    if model not in ("couplings", "charges"):
        raise InputFormatError("random.model must be 'couplings' or 'charges'")
    if "n" not in robj or "seed" not in robj:
        raise InputFormatError("random needs 'n' and 'seed'")
    n, seed = robj["n"], robj["seed"]
    if model == "couplings":
        variance = float(robj.get("variance", 1.0))
        return SystemInput("random", sample_gaussian_couplings(n, variance, seed))
    if "variance" in robj:
        raise InputFormatError("random charges are standard normal; 'variance' not allowed")
    k = sample_gaussian_charges(n, seed)
    return SystemInput("random", from_charges(k), charges=k)


def load_system(path) -> SystemInput:
    """Read and parse an input JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"invalid JSON in {path}: {exc}") from exc
    return parse_system(obj)


def neutrality_check(spec: TwoComponentSpec):
    if not spec.is_neutral:
        raise NotNeutral(
            f"n1*z1 = {float(spec.n1 * spec.z1)} != n2*z2 = {float(spec.n2 * spec.z2)}"
        )
