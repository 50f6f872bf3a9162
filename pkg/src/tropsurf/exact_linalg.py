"""Exact integer and rational linear algebra.

Everything here works over Python ints and ``fractions.Fraction``; no
floating point is used anywhere.  Pivot rules are fixed so that every
result is reproducible byte-for-byte:

* Smith normal form picks the nonzero entry of smallest absolute value,
  ties broken by row-major position.
* Rational elimination uses the first nonzero entry in each column as
  pivot, and particular solutions zero out all free variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ResourceLimitError, ValidationError

IntMatrix = list[list[int]]
RatMatrix = list[list[Fraction]]
RatVector = list[Fraction]


# ---------------------------------------------------------------------------
# small matrix helpers

def identity_matrix(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(matrix: Sequence[Sequence]) -> list[list]:
    if not matrix:
        return []
    return [list(col) for col in zip(*matrix)]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    if a and b:
        assert len(a[0]) == len(b), "dimension mismatch"
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a: Sequence[Sequence], x: Sequence) -> list:
    return [sum(c * v for c, v in zip(row, x)) for row in a]


def dot(x: Sequence, y: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(x, y)), start=Fraction(0))


def parse_rational(token: str) -> Fraction:
    """Parse ``p`` or ``p/q`` into a canonical Fraction."""
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad rational literal {token!r}") from exc


def format_rational(value: Fraction | int) -> str:
    """Serialize in lowest terms, integers without the ``/1`` suffix."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended gcd: returns (g, x, y) with a*x + b*y = g and g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


# ---------------------------------------------------------------------------
# Smith normal form

@dataclass(frozen=True)
class SmithForm:
    """U * A * V = D with U, V unimodular and D diagonal, d1 | d2 | ... >= 0."""

    u: tuple[tuple[int, ...], ...]
    d: tuple[tuple[int, ...], ...]
    v: tuple[tuple[int, ...], ...]

    @property
    def diagonal(self) -> tuple[int, ...]:
        n = min(len(self.d), len(self.d[0]) if self.d else 0)
        return tuple(self.d[i][i] for i in range(n))

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(x for x in self.diagonal if x != 0)


def smith_normal_form(a: Sequence[Sequence[int]]) -> SmithForm:
    m = len(a)
    n = len(a[0]) if m else 0
    d = [[int(x) for x in row] for row in a]
    u = identity_matrix(m)
    v = identity_matrix(n)

    def row_swap(i, j):
        if i != j:
            d[i], d[j] = d[j], d[i]
            u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        if i != j:
            for r in range(m):
                d[r][i], d[r][j] = d[r][j], d[r][i]
            for r in range(n):
                v[r][i], v[r][j] = v[r][j], v[r][i]

    def row_sub(i, j, q):
        # row i -= q * row j
        if q:
            d[i] = [x - q * y for x, y in zip(d[i], d[j])]
            u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_sub(i, j, q):
        # col i -= q * col j
        if q:
            for r in range(m):
                d[r][i] -= q * d[r][j]
            for r in range(n):
                v[r][i] -= q * v[r][j]

    t = 0
    while t < m and t < n:
        # pivot: smallest nonzero |entry|, row-major tie break
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                w = abs(d[i][j])
                if w and (pivot is None or w < pivot[0]):
                    pivot = (w, i, j)
        if pivot is None:
            break
        row_swap(t, pivot[1])
        col_swap(t, pivot[2])

        while True:
            for i in range(t + 1, m):
                row_sub(i, t, d[i][t] // d[t][t])
            for j in range(t + 1, n):
                col_sub(j, t, d[t][j] // d[t][t])
            col_dirty = any(d[i][t] for i in range(t + 1, m))
            row_dirty = any(d[t][j] for j in range(t + 1, n))
            if col_dirty or row_dirty:
                # a remainder survived; it is smaller than the pivot, promote it
                best = None
                for i in range(t, m):
                    for j in range(t, n):
                        w = abs(d[i][j])
                        if w and (best is None or w < best[0]):
                            best = (w, i, j)
                row_swap(t, best[1])
                col_swap(t, best[2])
                continue
            offender = None
            p = d[t][t]
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if d[i][j] % p:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_sub(t, offender, -1)  # add offending row, then re-reduce
        t += 1

    for i in range(min(m, n)):
        if d[i][i] < 0:
            d[i] = [-x for x in d[i]]
            u[i] = [-x for x in u[i]]

    freeze = lambda mat: tuple(tuple(row) for row in mat)
    return SmithForm(freeze(u), freeze(d), freeze(v))


# ---------------------------------------------------------------------------
# inertia of a symmetric matrix by congruence (Sylvester's law)

@dataclass(frozen=True)
class Inertia:
    positive: int
    zero: int
    negative: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.positive, self.zero, self.negative)


def inertia(s: Sequence[Sequence[Fraction | int]]) -> Inertia:
    """Exact signature of a symmetric rational matrix.

    Congruence reduction with 1x1 pivots.  When every remaining
    diagonal entry vanishes but an off-diagonal one does not, the
    congruence adding row/column j into i makes the (i,i) entry 2*s_ij
    and the reduction continues.  Raises on non-symmetric input.
    """
    n = len(s)
    w = [[Fraction(x) for x in row] for row in s]
    for i in range(n):
        if len(w[i]) != n:
            raise ValidationError("inertia: matrix is not square")
        for j in range(i + 1, n):
            if w[i][j] != w[j][i]:
                raise ValidationError("inertia: matrix is not symmetric")

    active = list(range(n))
    pos = neg = 0
    while active:
        pivot = next((i for i in active if w[i][i] != 0), None)
        if pivot is None:
            pair = None
            for i in active:
                for j in active:
                    if j > i and w[i][j] != 0:
                        pair = (i, j)
                        break
                if pair:
                    break
            if pair is None:
                break  # remaining block is identically zero
            i, j = pair
            for k in range(n):
                w[i][k] += w[j][k]
            for k in range(n):
                w[k][i] += w[k][j]
            pivot = i
        p = w[pivot][pivot]
        if p > 0:
            pos += 1
        else:
            neg += 1
        active.remove(pivot)
        for i in active:
            f = w[i][pivot] / p
            if f:
                for k in range(n):
                    w[i][k] -= f * w[pivot][k]
                for k in range(n):
                    w[k][i] -= f * w[k][pivot]
    return Inertia(pos, n - pos - neg, neg)


# ---------------------------------------------------------------------------
# rational elimination: kernels and solvers

def _rref(rows: RatMatrix) -> tuple[RatMatrix, list[int]]:
    """Reduced row echelon form; pivots are the first nonzero entry per column."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    r = 0
    pivots = []
    for c in range(n):
        hit = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if hit is None:
            continue
        rows[r], rows[hit] = rows[hit], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return rows, pivots


def kernel_basis(a: Sequence[Sequence[Fraction | int]]) -> list[RatVector]:
    """Basis of the right null space over Q.

    Deterministic: one basis vector per free column, taken in column
    order, with the free variable set to 1.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    if n == 0:
        return []
    if m == 0:
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    rows = [[Fraction(x) for x in row] for row in a]
    rows, pivots = _rref(rows)
    pivot_set = set(pivots)
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * n
        vec[free] = Fraction(1)
        for r, c in enumerate(pivots):
            vec[c] = -rows[r][free]
        basis.append(vec)
    return basis


def solve_rational(a: Sequence[Sequence[Fraction | int]],
                   b: Sequence[Fraction | int]) -> RatVector | None:
    """Some rational solution of A x = b, or None; free variables are zeroed."""
    m = len(a)
    n = len(a[0]) if m else 0
    if len(b) != m:
        raise ValidationError("solve_rational: dimension mismatch")
    aug = [[Fraction(x) for x in row] + [Fraction(bb)] for row, bb in zip(a, b)]
    if m == 0:
        return [Fraction(0)] * n
    aug, pivots = _rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        x[c] = aug[r][n]
    return x


def solve_integral(a: Sequence[Sequence[int]],
                   b: Sequence[int]) -> list[int] | None:
    """An integer solution of A x = b via Smith normal form, or None.

    With U A V = D the system becomes D y = U b; a solution exists iff
    every nonzero d_i divides (U b)_i and the remaining entries of U b
    vanish.  Absence is certified by that divisibility failure.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    if len(b) != m:
        raise ValidationError("solve_integral: dimension mismatch")
    if m == 0:
        return [0] * n
    snf = smith_normal_form(a)
    c = mat_vec(snf.u, [int(x) for x in b])
    y = [0] * n
    for i in range(m):
        di = snf.d[i][i] if i < min(m, n) else 0
        if di:
            if c[i] % di:
                return None
            y[i] = c[i] // di
        elif c[i]:
            return None
    return mat_vec(snf.v, y)


# ---------------------------------------------------------------------------
# integer lattices

def integer_kernel_basis(a: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of the saturated lattice {x in Z^n : A x = 0}."""
    m = len(a)
    n = len(a[0]) if m else 0
    if m == 0:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    snf = smith_normal_form(a)
    cols = []
    for j in range(n):
        dj = snf.d[j][j] if j < min(m, n) else 0
        if dj == 0:
            cols.append([snf.v[i][j] for i in range(n)])
    return cols


def lattice_basis(generators: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite basis of the lattice spanned by the generators."""
    rows: dict[int, list[int]] = {}
    for g in generators:
        vec = [int(x) for x in g]
        while True:
            p = next((i for i, x in enumerate(vec) if x), None)
            if p is None:
                break
            if p not in rows:
                if vec[p] < 0:
                    vec = [-x for x in vec]
                rows[p] = vec
                break
            ref = rows[p]
            a0, b0 = ref[p], vec[p]
            if b0 % a0 == 0:
                q = b0 // a0
                vec = [x - q * y for x, y in zip(vec, ref)]
            else:
                g0, s, t = xgcd(a0, b0)
                combined = [s * x + t * y for x, y in zip(ref, vec)]
                vec = [(a0 // g0) * y - (b0 // g0) * x for x, y in zip(ref, vec)]
                rows[p] = combined
    pivots = sorted(rows)
    basis = [rows[p] for p in pivots]
    # canonical form: entries above each pivot reduced into [0, pivot)
    for idx in range(len(basis) - 1, -1, -1):
        p = pivots[idx]
        for k in range(idx):
            q = basis[k][p] // basis[idx][p]
            if q:
                basis[k] = [x - q * y for x, y in zip(basis[k], basis[idx])]
    return basis


def lattice_quotient(generators_big: Sequence[Sequence[int]],
                     generators_small: Sequence[Sequence[int]],
                     ) -> tuple[int, tuple[int, ...]]:
    """Invariant factors of span(big) / span(small).

    Returns (free rank, torsion factors > 1).  Containment of the small
    lattice in the big one is verified via solve_integral and violation
    raises ValidationError.
    """
    big = lattice_basis(generators_big)
    r = len(big)
    coords = []
    bt = transpose(big)  # columns are the basis rows
    for s in generators_small:
        x = solve_integral(bt, list(s)) if r else ([] if not any(s) else None)
        if x is None:
            if any(s):
                raise ValidationError(
                    "lattice_quotient: small lattice is not contained in big lattice")
            x = [0] * r
        coords.append(x)
    if not coords or r == 0:
        return r, ()
    x_matrix = transpose(coords)  # r x len(small)
    snf = smith_normal_form(x_matrix)
    factors = snf.invariant_factors
    free_rank = r - len(factors)
    torsion = tuple(f for f in factors if f > 1)
    return free_rank, torsion


# ---------------------------------------------------------------------------
# exact linear feasibility by Fourier-Motzkin elimination

LinearConstraint = tuple[Sequence[Fraction | int], Fraction | int]


def _normalize(rows):
    """Scale each row so its leading coefficient is +-1 and drop duplicates."""
    seen: dict[tuple, Fraction] = {}
    order: list[tuple] = []
    for coeffs, rhs in rows:
        lead = next((x for x in coeffs if x != 0), None)
        if lead is None:
            key = coeffs
            scaled_rhs = rhs
        else:
            s = abs(lead)
            key = tuple(x / s for x in coeffs)
            scaled_rhs = rhs / s
        if key not in seen or scaled_rhs > seen[key]:
            if key not in seen:
                order.append(key)
            seen[key] = scaled_rhs
    return [(list(k), seen[k]) for k in order]


def linear_feasibility(equalities: Sequence[LinearConstraint],
                       inequalities: Sequence[LinearConstraint],
                       max_vars: int = 64,
                       ) -> tuple[bool, RatVector | None]:
    """Decide feasibility of {x : A x = b, C x >= d} exactly.

    Fourier-Motzkin elimination; exponential in the worst case, which is
    why the variable count is capped (default 64).  If feasible, one
    exact rational witness is returned, built by back-substituting the
    smallest admissible value for each variable in index order.
    """
    nvars = 0
    for coeffs, _ in list(equalities) + list(inequalities):
        nvars = max(nvars, len(coeffs))
    if nvars > max_vars:
        raise ResourceLimitError(
            f"linear_feasibility: {nvars} variables exceeds cap {max_vars}")

    def widen(c):
        c = [Fraction(x) for x in c]
        return c + [Fraction(0)] * (nvars - len(c))

    rows: list[tuple[list[Fraction], Fraction]] = []
    for coeffs, rhs in equalities:
        c = widen(coeffs)
        rows.append((c, Fraction(rhs)))
        rows.append(([-x for x in c], -Fraction(rhs)))
    for coeffs, rhs in inequalities:
        rows.append((widen(coeffs), Fraction(rhs)))

    bounds: list[tuple[list, list]] = [([], [])] * nvars
    for j in range(nvars - 1, -1, -1):
        lows, ups, rest = [], [], []
        for coeffs, rhs in rows:
            cj = coeffs[j]
            if cj == 0:
                rest.append((coeffs, rhs))
                continue
            # sum_{i<j} c_i x_i + cj x_j >= rhs
            expr = ([-coeffs[i] / cj for i in range(j)], rhs / cj)
            (lows if cj > 0 else ups).append(expr)
        combined = []
        for lc, lconst in lows:
            for uc, uconst in ups:
                coeffs = [u - l for u, l in zip(uc, lc)] + [Fraction(0)] * (nvars - j)
                combined.append((coeffs, lconst - uconst))
        bounds[j] = (lows, ups)
        rows = _normalize(rest + combined)

    for coeffs, rhs in rows:
        if rhs > 0:
            return False, None

    witness: RatVector = []
    for j in range(nvars):
        lows, ups = bounds[j]
        lo_vals = [dot(c, witness) + k for c, k in lows]
        up_vals = [dot(c, witness) + k for c, k in ups]
        if lo_vals:
            val = max(lo_vals)
        elif up_vals:
            val = min(min(up_vals), Fraction(0))
        else:
            val = Fraction(0)
        witness.append(val)
    return True, witness
