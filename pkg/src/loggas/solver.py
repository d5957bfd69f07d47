"""Critical inverse temperatures via discrete subset-ratio optimization.

For a symmetric coupling matrix the two optimization targets are the extrema
over subsets S (|S| >= 2) of the ratio  sum_{i<j in S} c(i,j) / (|S|-1).
T+ is minus the minimum, T- is minus the maximum; the partition function is
finite exactly on (beta-, beta+) with beta+ = 1/T+ when T+ > 0 (else +inf)
and beta- = 1/T- when T- < 0 (else -inf).

Enumeration walks all 2^n subsets in Gray-code order, maintaining the subset
sum incrementally.  In exact mode entries are scaled to a common-denominator
integer grid, so every comparison is integer cross-multiplication and ties
are exact.  Optimizer families, maximal nests (laminar subfamilies) and the
limiting-support rendering follow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .coupling import CouplingMatrix
from .errors import (
    FamilyTooLarge,
    InputFormatError,
    InstanceTooLarge,
    NotCritical,
)
from .rational import Real

_FLOAT_RESYNC = 65536  # refresh incremental float sums to bound drift
_COLLECT_CAP = 1_000_000


@dataclass(frozen=True, order=True)
class SubsetMask:
    """A subset of {0,..,n-1} as a bitmask; at least two members."""

    bits: int

    def __post_init__(self):
        if self.bits.bit_count() < 2:
            raise ValueError(f"subset needs at least 2 members, got bits={self.bits:b}")

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    def indices(self) -> tuple:
        bits, out = self.bits, []
        while bits:
            b = bits & -bits
            out.append(b.bit_length() - 1)
            bits ^= b
        return tuple(out)

    def label(self) -> str:
        """1-based rendering, e.g. {1,3}."""
        return "{" + ",".join(str(i + 1) for i in self.indices()) + "}"

    @classmethod
    def from_indices(cls, indices) -> "SubsetMask":
        bits = 0
        for i in indices:
            bits |= 1 << i
        return cls(bits)


@dataclass(frozen=True)
class OptResult:
    """Optimum value and the family of subsets attaining it.

    ``attained`` is False when every subset sum has the wrong sign or is
    zero, i.e. when the corresponding endpoint is infinite; zero-sum subsets
    never enter the family.
    """

    t_value: Real
    optimizers: tuple
    attained: bool


@dataclass(frozen=True)
class SubsetConstraint:
    """The inequality beta * a_s + (|S|-1) > 0 induced by one subset."""

    a_s: Real
    b_s: int
    kind: str  # 'lower' | 'upper' | 'none'
    bound: Optional[Real]


@dataclass(frozen=True)
class Nest:
    """Pairwise nested subsets: any two are comparable or disjoint."""

    members: tuple

    def __post_init__(self):
        for i, s in enumerate(self.members):
            for t in self.members[i + 1:]:
                if not _nested(s.bits, t.bits):
                    raise ValueError(f"{s.label()} and {t.label()} are not nested")


@dataclass(frozen=True)
class NestSearch:
    kappa: int
    nests: tuple
    truncated: bool


@dataclass(frozen=True)
class SupportDescription:
    """Limiting Gibbs support: one coincidence pattern per maximal nest."""

    nests: tuple
    rendered: tuple


@dataclass(frozen=True)
class SolverOptions:
    max_n: int = 26
    tie_tol: float = 1e-9
    exact: Optional[bool] = None  # None: exact whenever the matrix is
    partitions: int = 1
    nest_cap: int = 10_000
    family_cap: int = 4096


@dataclass(frozen=True)
class CriticalReport:
    n: int
    exact: bool
    t_plus: Real
    t_minus: Real
    beta_plus: Real
    beta_minus: Real
    g_plus: tuple
    g_minus: tuple
    attained_plus: bool
    attained_minus: bool
    kappa_plus: int
    kappa_minus: int
    max_nests_plus: tuple
    max_nests_minus: tuple
    nests_truncated_plus: bool
    nests_truncated_minus: bool
    support_plus: SupportDescription
    support_minus: SupportDescription
    degenerate: bool


def _nested(x: int, y: int) -> bool:
    common = x & y
    return common == 0 or common == x or common == y


def _resolve_exact(c: CouplingMatrix, opts: SolverOptions) -> bool:
    if opts.exact is None:
        return c.is_exact
    if opts.exact and not c.is_exact:
        raise InputFormatError("exact mode requires rational matrix entries")
    return opts.exact


def _int_rows(c: CouplingMatrix):
    """Scale exact entries to integers over a common denominator."""
    denom = 1
    for row in c.exact_entries:
        for q in row:
            denom = denom * q.denominator // math.gcd(denom, q.denominator)
    rows = [[int(q * denom) for q in row] for row in c.exact_entries]
    return rows, denom


def _float_rows(c: CouplingMatrix):
    return [[float(v) for v in row] for row in c.entries]


def _mask_sum(rows, mask: int):
    total = 0
    bits, idx = mask, []
    while bits:
        b = bits & -bits
        i = b.bit_length() - 1
        row = rows[i]
        for j in idx:
            total += row[j]
        idx.append(i)
        bits ^= b
    return total


# ---------------------------------------------------------------------------
# Gray-code scan: pass 1 finds both extrema, pass 2 collects the tie families
# ---------------------------------------------------------------------------

def _walk(rows, lo: int, hi: int, visit, resync: int = 0):
    """Visit (mask, size, subset_sum) for masks gray(lo)..gray(hi-1)."""
    mask = lo ^ (lo >> 1)
    size = mask.bit_count()
    acc = _mask_sum(rows, mask)
    if size >= 2:
        visit(mask, size, acc)
    i = lo
    steps = 0
    while i + 1 < hi:
        i += 1
        low = i & -i
        t = low.bit_length() - 1
        bit = 1 << t
        row = rows[t]
        if mask & bit:
            mask ^= bit
            d = 0
            m = mask
            while m:
                b = m & -m
                d += row[b.bit_length() - 1]
                m ^= b
            acc -= d
            size -= 1
        else:
            d = 0
            m = mask
            while m:
                b = m & -m
                d += row[b.bit_length() - 1]
                m ^= b
            acc += d
            mask ^= bit
            size += 1
        if resync:
            steps += 1
            if steps % resync == 0:
                acc = _mask_sum(rows, mask)
        if size >= 2:
            visit(mask, size, acc)
    return None


def _extrema_exact(rows, lo, hi):
    state = {"min": None, "max": None}

    def visit(mask, size, a):
        m = size - 1
        mn, mx = state["min"], state["max"]
        if mn is None:
            state["min"] = (a, m)
            state["max"] = (a, m)
            return
        if a * mn[1] < mn[0] * m:
            state["min"] = (a, m)
        if a * mx[1] > mx[0] * m:
            state["max"] = (a, m)

    _walk(rows, lo, hi, visit)
    return state["min"], state["max"]


def _extrema_float(rows, lo, hi):
    state = {"min": None, "max": None}

    def visit(mask, size, a):
        r = a / (size - 1)
        if state["min"] is None or r < state["min"]:
            state["min"] = r
        if state["max"] is None or r > state["max"]:
            state["max"] = r

    _walk(rows, lo, hi, visit, resync=_FLOAT_RESYNC)
    return state["min"], state["max"]


def _collect_exact(rows, lo, hi, min_pair, max_pair):
    mins, maxs = [], []
    mn_a, mn_m = min_pair
    mx_a, mx_m = max_pair

    def visit(mask, size, a):
        if a == 0:
            return  # zero-sum subsets impose no constraint, never optimizers
        m = size - 1
        if a * mn_m == mn_a * m:
            mins.append(mask)
        if a * mx_m == mx_a * m:
            maxs.append(mask)
        if len(mins) + len(maxs) > _COLLECT_CAP:
            raise FamilyTooLarge("optimizer family exceeds internal cap")

    _walk(rows, lo, hi, visit)
    return mins, maxs


def _collect_float(rows, lo, hi, rmin, rmax, tol):
    mins, maxs = [], []
    tol_min = tol * max(1.0, abs(rmin))
    tol_max = tol * max(1.0, abs(rmax))

    def visit(mask, size, a):
        if a == 0.0:
            return
        r = a / (size - 1)
        if abs(r - rmin) <= tol_min:
            mins.append(mask)
        if abs(r - rmax) <= tol_max:
            maxs.append(mask)
        if len(mins) + len(maxs) > _COLLECT_CAP:
            raise FamilyTooLarge("optimizer family exceeds internal cap")

    _walk(rows, lo, hi, visit, resync=_FLOAT_RESYNC)
    return mins, maxs


@dataclass(frozen=True)
class _Scan:
    min_ratio: Real
    max_ratio: Real
    min_masks: tuple
    max_masks: tuple


def _partition_bounds(n: int, parts: int):
    total = 1 << n
    parts = max(1, min(parts, total))
    step = total // parts
    bounds = []
    lo = 0
    for p in range(parts):
        hi = total if p == parts - 1 else lo + step
        bounds.append((lo, hi))
        lo = hi
    return bounds

def _scan(c: CouplingMatrix, opts: SolverOptions, collect: bool = True) -> _Scan:
    exact = _resolve_exact(c, opts)
    bounds = _partition_bounds(c.n, opts.partitions)
    if exact:
        rows, denom = _int_rows(c)
        pieces = [_extrema_exact(rows, lo, hi) for lo, hi in bounds]
        best_min = best_max = None
        for mn, mx in pieces:
            if mn is not None and (best_min is None or mn[0] * best_min[1] < best_min[0] * mn[1]):
                best_min = mn
            if mx is not None and (best_max is None or mx[0] * best_max[1] > best_max[0] * mx[1]):
                best_max = mx
        min_ratio = Fraction(best_min[0], denom * best_min[1])
        max_ratio = Fraction(best_max[0], denom * best_max[1])
        if not collect:
            return _Scan(min_ratio, max_ratio, (), ())
        mins, maxs = [], []
        for lo, hi in bounds:
            a, b = _collect_exact(rows, lo, hi, best_min, best_max)
            mins.extend(a)
            maxs.extend(b)
    else:
        rows = _float_rows(c)
        pieces = [_extrema_float(rows, lo, hi) for lo, hi in bounds]
        min_ratio = min(mn for mn, _ in pieces if mn is not None)
        max_ratio = max(mx for _, mx in pieces if mx is not None)
        if not collect:
            return _Scan(min_ratio, max_ratio, (), ())
        mins, maxs = [], []
        for lo, hi in bounds:
            a, b = _collect_float(rows, lo, hi, min_ratio, max_ratio, opts.tie_tol)
            mins.extend(a)
            maxs.extend(b)
    key = lambda m: (m.bit_count(), m)
    min_masks = tuple(SubsetMask(m) for m in sorted(set(mins), key=key))
    max_masks = tuple(SubsetMask(m) for m in sorted(set(maxs), key=key))
    return _Scan(min_ratio, max_ratio, min_masks, max_masks)


def _check_size(c: CouplingMatrix, opts: SolverOptions):
    if c.n > opts.max_n:
        raise InstanceTooLarge(f"n={c.n} exceeds solver cap {opts.max_n}")


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def subset_sum(c: CouplingMatrix, s: SubsetMask) -> Real:
    """Sum of c(i,j) over unordered pairs inside s; exact when entries are."""
    if s.bits >> c.n:
        raise ValueError(f"mask {s.bits:b} has bits beyond n={c.n}")
    idx = s.indices()
    if c.is_exact:
        total = Fraction(0)
        for a, i in enumerate(idx):
            for j in idx[a + 1:]:
                total += c.exact_entries[i][j]
        return total
    total = 0.0
    for a, i in enumerate(idx):
        for j in idx[a + 1:]:
            total += float(c.entries[i, j])
    return total


def subset_constraint(c: CouplingMatrix, s: SubsetMask) -> SubsetConstraint:
    """Coefficients (a_s, b_s = |S|-2) and the induced bound on beta.

    a_s > 0 gives beta > -(|S|-1)/a_s, a_s < 0 gives beta < -(|S|-1)/a_s,
    a_s = 0 constrains nothing.
    """
    a = subset_sum(c, s)
    b = s.size - 2
    if a == 0:
        return SubsetConstraint(a, b, "none", None)
    m = s.size - 1
    bound = -(Fraction(m) / a) if isinstance(a, Fraction) else -(m / a)
    return SubsetConstraint(a, b, "lower" if a > 0 else "upper", bound)


def solve_t_plus(c: CouplingMatrix, opts: Optional[SolverOptions] = None) -> OptResult:
    """T+ = -min_S ratio(S); optimizers are the negative-sum argmin sets."""
    opts = opts or SolverOptions()
    _check_size(c, opts)
    scan = _scan(c, opts)
    return OptResult(-scan.min_ratio, scan.min_masks, attained=scan.min_ratio < 0)


def solve_t_minus(c: CouplingMatrix, opts: Optional[SolverOptions] = None) -> OptResult:
    """T- = -max_S ratio(S); optimizers are the positive-sum argmax sets."""
    opts = opts or SolverOptions()
    _check_size(c, opts)
    scan = _scan(c, opts)
    return OptResult(-scan.max_ratio, scan.max_masks, attained=scan.max_ratio > 0)


def solve_both(c: CouplingMatrix, opts: Optional[SolverOptions] = None):
    """(plus, minus) results from a single shared scan."""
    opts = opts or SolverOptions()
    _check_size(c, opts)
    scan = _scan(c, opts)
    plus = OptResult(-scan.min_ratio, scan.min_masks, attained=scan.min_ratio < 0)
    minus = OptResult(-scan.max_ratio, scan.max_masks, attained=scan.max_ratio > 0)
    return plus, minus


def max_nest(family: Sequence[SubsetMask], nest_cap: int = 10_000,
             family_cap: int = 4096) -> NestSearch:
    """Maximum-size pairwise-nested subfamilies of an optimizer family.

    kappa is computed exactly by branch-and-bound; the enumeration of all
    maximum nests is capped at ``nest_cap`` (truncated flag set beyond).
    """
    fam = list(family)
    if not fam:
        raise ValueError("family must be nonempty")
    if len(set(s.bits for s in fam)) != len(fam):
        raise ValueError("family members must be pairwise distinct")
    if len(fam) > family_cap:
        raise FamilyTooLarge(f"family of size {len(fam)} exceeds cap {family_cap}")

    fam.sort(key=lambda s: (-s.size, s.bits))
    k = len(fam)
    compat = [0] * k
    for i in range(k):
        for j in range(i + 1, k):
            if _nested(fam[i].bits, fam[j].bits):
                compat[i] |= 1 << j

    best = 0

    def grow(depth: int, cand: int):
        nonlocal best
        if depth > best:
            best = depth
        while cand:
            if depth + cand.bit_count() <= best:
                return
            b = cand & -cand
            j = b.bit_length() - 1
            cand ^= b
            grow(depth + 1, cand & compat[j])

    grow(0, (1 << k) - 1)
    kappa = best

    found = []
    truncated = False

    def enumerate_nests(stack: list, cand: int):
        nonlocal truncated
        if len(stack) == kappa:
            if len(found) < nest_cap:
                found.append(tuple(stack))
            else:
                truncated = True
            return
        while cand:
            if truncated or len(stack) + cand.bit_count() < kappa:
                return
            b = cand & -cand
            j = b.bit_length() - 1
            cand ^= b
            stack.append(j)
            enumerate_nests(stack, cand & compat[j])
            stack.pop()

    enumerate_nests([], (1 << k) - 1)

    nests = []
    for combo in found:
        members = sorted((fam[j] for j in combo),
                         key=lambda s: (min(s.indices()), s.size, s.bits))
        nests.append(Nest(tuple(members)))
    nests.sort(key=lambda nest: tuple(s.bits for s in nest.members))
    return NestSearch(kappa, tuple(nests), truncated)


def _render_nest(nest: Nest) -> str:
    chains = []
    for s in nest.members:
        chains.append("=".join(f"p{i + 1}" for i in s.indices()))
    return ", ".join(chains)


def limit_support(result: OptResult, nests: Sequence[Nest]) -> SupportDescription:
    """Coincidence-set rendering of the limiting Gibbs support.

    One pattern per maximal nest: each subset becomes an equality chain of
    1-based particle labels.
    """
    if not result.attained:
        raise NotCritical("no finite endpoint on this side")
    nests = tuple(nests)
    return SupportDescription(nests, tuple(_render_nest(k) for k in nests))


def critical_interval(c: CouplingMatrix, opts: Optional[SolverOptions] = None) -> CriticalReport:
    """Full report: endpoints, optimizer families, nests and support."""
    opts = opts or SolverOptions()
    plus, minus = solve_both(c, opts)
    exact = _resolve_exact(c, opts)

    one = Fraction(1) if isinstance(plus.t_value, Fraction) else 1.0
    beta_plus: Real = one / plus.t_value if plus.attained else math.inf
    beta_minus: Real = one / minus.t_value if minus.attained else -math.inf

    def side(result: OptResult):
        if not result.attained:
            return 0, (), False, SupportDescription((), ())
        search = max_nest(result.optimizers, opts.nest_cap, opts.family_cap)
        support = limit_support(result, search.nests)
        return search.kappa, search.nests, search.truncated, support

    kappa_p, nests_p, trunc_p, support_p = side(plus)
    kappa_m, nests_m, trunc_m, support_m = side(minus)

    return CriticalReport(
        n=c.n,
        exact=exact,
        t_plus=plus.t_value,
        t_minus=minus.t_value,
        beta_plus=beta_plus,
        beta_minus=beta_minus,
        g_plus=plus.optimizers,
        g_minus=minus.optimizers,
        attained_plus=plus.attained,
        attained_minus=minus.attained,
        kappa_plus=kappa_p,
        kappa_minus=kappa_m,
        max_nests_plus=nests_p,
        max_nests_minus=nests_m,
        nests_truncated_plus=trunc_p,
        nests_truncated_minus=trunc_m,
        support_plus=support_p,
        support_minus=support_m,
        degenerate=not (plus.attained or minus.attained),
    )


# ---------------------------------------------------------------------------
# Independent oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleResult:
    t_plus: Real
    t_minus: Real
    g_plus: tuple
    g_minus: tuple


def brute_force_oracle(c: CouplingMatrix, tie_tol: float = 1e-9) -> OracleResult:
    """Reference solver: plain loop over all masks, no pruning, no
    incremental sums.  Kept deliberately simple; n <= 16."""
    if c.n > 16:
        raise InstanceTooLarge(f"oracle limited to n <= 16, got {c.n}")
    ratios = {}
    for mask in range(1 << c.n):
        idx = [i for i in range(c.n) if (mask >> i) & 1]
        if len(idx) < 2:
            continue
        if c.is_exact:
            total = Fraction(0)
            for a, i in enumerate(idx):
                for j in idx[a + 1:]:
                    total += c.exact_entries[i][j]
            ratios[mask] = total / (len(idx) - 1)
        else:
            total = 0.0
            for a, i in enumerate(idx):
                for j in idx[a + 1:]:
                    total += float(c.entries[i, j])
            ratios[mask] = total / (len(idx) - 1)

    rmin = min(ratios.values())
    rmax = max(ratios.values())

    def ties(target):
        out = []
        for mask, r in ratios.items():
            zero_sum = r == 0
            if zero_sum:
                continue
            if c.is_exact:
                if r == target:
                    out.append(mask)
            elif abs(r - target) <= tie_tol * max(1.0, abs(target)):
                out.append(mask)
        key = lambda m: (m.bit_count(), m)
        return tuple(SubsetMask(m) for m in sorted(out, key=key))

    return OracleResult(-rmin, -rmax, ties(rmin), ties(rmax))
