"""Character tables of commutative association schemes.

The table P = [p_j(i)] is recovered numerically.  The intersection matrices
B_j commute, so a random positive combination M = sum_j c_j B_j has the
shared eigenvectors of the whole family, one per character, and generically
a simple spectrum.  Each eigenvector has coordinate l proportional to
conj(p_l(i)) / k_l, so coordinate 0 never vanishes; normalizing there and
reading coordinate 0 of B_j v yields p_j(i) directly.  A two-sided
Rayleigh-quotient pass stands by as a refinement when the residual check
trips on badly scaled spectra.

Multiplicities come from the first orthogonality relation, and all residual
checks are scale-normalized so that tolerances mean the same thing for a
6-point scheme and a 39000-point one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import (DEFAULT_SEED, DEFAULT_TOL_COMPARE, DEFAULT_TOL_EIGEN,
                     DEFAULT_TOL_SQUARE, EIGENVALUE_COLLISION_TOL)
from .errors import (DegenerateCombination, EigensolverFailure,
                     MismatchWithOrbitalTable, NonCommutative,
                     NonPositiveMultiplicity, NotGroupScheme,
                     NotMultiplicityFree, ParseError, UnsupportedQ)
from .gf import factor_prime_power
from .permgroup import (CosetAction, PermutationGroup, coset_action,
                        double_cosets, group_scheme, orbitals)
from .scheme import AssociationScheme, IntersectionNumbers, intersection_numbers


class CharacterTable:
    """P = [p_j(i)] with the valencies on row 0 and p_0(i) = 1 down column 0."""

    def __init__(self, P, valencies, multiplicities, n):
        self.P = np.asarray(P, dtype=np.complex128)
        self.valencies = np.asarray(valencies, dtype=np.int64)
        self.multiplicities = np.asarray(multiplicities, dtype=np.float64)
        self.n = int(n)
        if self.P.ndim != 2 or self.P.shape[0] != self.P.shape[1]:
            raise ValueError("character table must be square")
        if self.valencies.shape[0] != self.P.shape[0]:
            raise ValueError("one valency per column is required")
        if self.multiplicities.shape[0] != self.P.shape[0]:
            raise ValueError("one multiplicity per row is required")

    @property
    def d(self) -> int:
        return self.P.shape[0] - 1

    def row(self, i: int) -> np.ndarray:
        return self.P[i]

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "P": [[{"re": float(z.real), "im": float(z.imag)} for z in row]
                  for row in self.P],
            "valencies": [int(k) for k in self.valencies],
            "multiplicities": [float(m) for m in self.multiplicities],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CharacterTable":
        try:
            d = int(data["d"])
            n = int(data["n"])
            P = np.array([[complex(cell["re"], cell["im"]) for cell in row]
                          for row in data["P"]], dtype=np.complex128)
            valencies = data["valencies"]
            mults = data["multiplicities"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed character table: {exc}") from None
        if P.shape != (d + 1, d + 1):
            raise ParseError(f"P must be {d + 1} x {d + 1}")
        return cls(P, valencies, mults, n)

    def __repr__(self):
        return f"CharacterTable(d={self.d}, n={self.n})"


def multiplicities(P, valencies, n) -> np.ndarray:
    """m_i = n / sum_l |p_l(i)|^2 / k_l, from the first orthogonality relation."""
    P = np.asarray(P, dtype=np.complex128)
    k = np.asarray(valencies, dtype=np.float64)
    denom = (np.abs(P) ** 2 / k).sum(axis=1)
    if np.any(denom <= 0):
        raise NonPositiveMultiplicity("a row of P has nonpositive norm")
    m = n / denom
    if np.any(m <= 0):
        raise NonPositiveMultiplicity("derived multiplicities must be positive")
    return m


def _row_sort_keys(P: np.ndarray, decimals: int = 6) -> np.ndarray:
    scale = 10 ** decimals
    re = np.round(P.real * scale).astype(np.int64)
    im = np.round(P.imag * scale).astype(np.int64)
    keys = np.empty((P.shape[0], 2 * P.shape[1]), dtype=np.int64)
    keys[:, 0::2] = re
    keys[:, 1::2] = im
    return keys


def compute_character_table(source, seed: int = DEFAULT_SEED,
                            tol_eigen: float = DEFAULT_TOL_EIGEN,
                            collision_tol: float = EIGENVALUE_COLLISION_TOL,
                            max_tries: int = 20,
                            reps_per_class: int = 3) -> CharacterTable:
    """Character table of a commutative scheme (or of precomputed
    intersection numbers) by simultaneous diagonalization.

    Retries with a fresh random combination when eigenvalues collide or a
    residual check fails; raises EigensolverFailure after max_tries."""
    if isinstance(source, AssociationScheme):
        inter = intersection_numbers(source, reps_per_class=reps_per_class)
    elif isinstance(source, IntersectionNumbers):
        inter = source
    else:
        raise TypeError("expected an AssociationScheme or IntersectionNumbers")
    if not inter.commutes:
        raise NonCommutative("intersection matrices do not commute; "
                             "the scheme is not commutative")
    k = inter.valencies.astype(np.float64)
    n = inter.n
    d1 = k.shape[0]
    B = np.stack([inter.B(j).astype(np.float64) for j in range(d1)])
    Bt = B.transpose(0, 2, 1).copy()
    # row 0 of B_j is k_j at the transpose class and zero elsewhere, so
    # coordinate 0 of B_j v is cheap to read for every eigenvector at once
    R0 = B[:, 0, :]
    rng = np.random.default_rng(seed)
    last_error = "no attempts made"
    for _ in range(max_tries):
        try:
            c = rng.uniform(1.0, 2.0, size=d1)
            M = np.tensordot(c, B, axes=1)
            eigvals, V = np.linalg.eig(M)
            gaps = np.abs(eigvals[:, None] - eigvals[None, :])
            gaps[np.diag_indices(d1)] = np.inf
            if gaps.min() < collision_tol:
                raise DegenerateCombination(
                    f"eigenvalue gap {gaps.min():.2e} below {collision_tol:.0e}")
            norm_m = max(np.linalg.norm(M), 1.0)
            resid = np.linalg.norm(M @ V - V * eigvals, axis=0)
            if resid.max() > tol_eigen * norm_m * 10:
                raise DegenerateCombination(
                    f"eigenpair residual {resid.max():.2e} too large")
            # each eigenvector has coefficient 1/k_l * conj(p_l(i)) at
            # coordinate l up to scale, so coordinate 0 never vanishes;
            # normalize there and read p_j(i) off as coordinate 0 of B_j v
            pivots = np.abs(V[0, :])
            if pivots.min() < 1e-12 * max(np.abs(V).max(), 1.0):
                raise DegenerateCombination("eigenvector pivot near zero")
            W = (R0 @ (V / V[0, :])).T
            self_check = _max_eigen_residual(Bt, k, W)
            if self_check > 10 * tol_eigen:
                W = _rayleigh_refine(M, Bt, eigvals, V, d1)
                self_check = _max_eigen_residual(Bt, k, W)
            if self_check > 10 * tol_eigen:
                raise DegenerateCombination(
                    f"eigen relation residual {self_check:.2e} too large")
            m = multiplicities(W, inter.valencies, n)
            if abs(m.sum() - n) > 1e-6 * n:
                raise DegenerateCombination(
                    f"multiplicities sum to {m.sum():.6f}, expected {n}")
            # valency row first, the rest in lexicographic order
            perron = int(np.argmin(np.abs(W - k[None, :]).max(axis=1)))
            if np.abs(W[perron] - k).max() > 1e-6 * max(1.0, k.max()):
                raise DegenerateCombination("no row matches the valencies")
            others = [i for i in range(d1) if i != perron]
            keys = _row_sort_keys(W[others])
            order = np.lexsort(keys.T[::-1])
            rows = [perron] + [others[int(i)] for i in order]
            P = W[rows]
            P[:, 0] = 1.0
            return CharacterTable(P, inter.valencies, m[rows], n)
        except DegenerateCombination as exc:
            last_error = str(exc)
    raise EigensolverFailure(
        f"no usable random combination after {max_tries} tries: {last_error}")


def _max_eigen_residual(Bt: np.ndarray, k: np.ndarray, W: np.ndarray) -> float:
    """max over rows i, classes j of |B_j^T w_i - p_j(i) w_i| / (k_j |w_i|)."""
    worst = 0.0
    norms = np.linalg.norm(W, axis=1)
    for j in range(Bt.shape[0]):
        image = W @ Bt[j].T                    # row i holds (B_j^T w_i)
        resid = np.linalg.norm(image - W[:, j][:, None] * W, axis=1)
        worst = max(worst, float((resid / (max(k[j], 1.0) * norms)).max()))
    return worst


def _rayleigh_refine(M: np.ndarray, Bt: np.ndarray, eigvals: np.ndarray,
                     V: np.ndarray, d1: int) -> np.ndarray:
    """Re-extract the table rows with two-sided Rayleigh quotients.

    The rows of P are the eigenvectors of the transposed combination, with
    the eigenvectors of M itself acting as their left partners.  Quotients
    (z^T B_j^T w) / (z^T w) have error quadratic in the eigenvector error,
    which rescues tables whose entries dwarf the eigenvector noise floor."""
    evalsT, WT = np.linalg.eig(M.T)
    pairing = np.abs(evalsT[:, None] - eigvals[None, :]).argmin(axis=1)
    if sorted(pairing.tolist()) != list(range(d1)):
        raise DegenerateCombination("left and right spectra did not pair up")
    Z = V[:, pairing]
    denom = (Z * WT).sum(axis=0)
    if np.abs(denom).min() < 1e-8 * np.abs(Z).max() * np.abs(WT).max():
        raise DegenerateCombination("ill-conditioned eigenvector pairing")
    W = np.empty((d1, d1), dtype=np.complex128)
    for j in range(d1):
        W[:, j] = (Z * (Bt[j] @ WT)).sum(axis=0) / denom
    return W


@dataclass
class OrthogonalityReport:
    passed: bool
    max_residual: float
    residual_rows: float     # first relation, rows against rows
    residual_columns: float  # second relation, columns against columns
    tol: float

    def __bool__(self):
        return self.passed


def verify_orthogonality(table: CharacterTable,
                         tol: float = DEFAULT_TOL_COMPARE) -> OrthogonalityReport:
    """Both orthogonality relations with scale-normalized residuals.

    First relation: sum_l p_l(i) conj(p_l(j)) / k_l = (n / m_i) delta_ij,
    normalized by n / sqrt(m_i m_j).  Second: sum_l m_l p_i(l) conj(p_j(l))
    = n k_i delta_ij, normalized by n sqrt(k_i k_j)."""
    P = table.P
    k = table.valencies.astype(np.float64)
    m = table.multiplicities
    n = table.n
    G1 = (P / k[None, :]) @ P.conj().T
    R1 = G1 - np.diag(n / m)
    scale1 = n / np.sqrt(np.outer(m, m))
    r1 = float(np.abs(R1 / scale1).max())
    G2 = (P.T * m[None, :]) @ P.conj()
    R2 = G2 - n * np.diag(k)
    scale2 = n * np.sqrt(np.outer(k, k))
    r2 = float(np.abs(R2 / scale2).max())
    worst = max(r1, r2)
    return OrthogonalityReport(worst <= tol, worst, r1, r2, tol)


@dataclass
class CandidateReport:
    passed: bool
    checks: dict
    max_eigen_residual: float
    orthogonality: OrthogonalityReport
    messages: list = field(default_factory=list)

    def __bool__(self):
        return self.passed


def verify_candidate_table(table: CharacterTable, source,
                           tol: float = DEFAULT_TOL_COMPARE,
                           reps_per_class: int = 3) -> CandidateReport:
    """Certify a claimed character table against a scheme's intersection
    numbers: column 0 all ones, row 0 equal to the valencies, every row an
    eigenvector of every B_j^T with eigenvalue p_j(i), and both
    orthogonality relations with the multiplicities the table itself
    carries (so rows and multiplicities cannot be paired wrongly)."""
    if isinstance(source, AssociationScheme):
        inter = intersection_numbers(source, reps_per_class=reps_per_class)
    elif isinstance(source, IntersectionNumbers):
        inter = source
    else:
        raise TypeError("expected an AssociationScheme or IntersectionNumbers")
    checks: dict[str, bool] = {}
    messages: list[str] = []
    P = table.P
    k = inter.valencies.astype(np.float64)
    d1 = k.shape[0]
    checks["shape"] = (P.shape == (d1, d1) and table.n == inter.n
                       and np.array_equal(table.valencies, inter.valencies))
    if not checks["shape"]:
        messages.append("table shape, order, or valencies do not match the scheme")
        ortho = OrthogonalityReport(False, float("inf"), float("inf"),
                                    float("inf"), tol)
        return CandidateReport(False, checks, float("inf"), ortho, messages)
    col0 = float(np.abs(P[:, 0] - 1.0).max())
    checks["unit_column"] = col0 <= tol
    if not checks["unit_column"]:
        messages.append(f"column 0 deviates from 1 by {col0:.2e}")
    row0 = float((np.abs(P[0] - k) / np.maximum(k, 1.0)).max())
    checks["valency_row"] = row0 <= tol
    if not checks["valency_row"]:
        messages.append(f"row 0 deviates from the valencies by {row0:.2e} (relative)")
    Bt = np.stack([inter.B(j).T.astype(np.float64) for j in range(d1)])
    eig_res = _max_eigen_residual(Bt, k, P)
    checks["eigen_relations"] = eig_res <= tol
    if not checks["eigen_relations"]:
        messages.append(f"eigen relation residual {eig_res:.2e} above {tol:.0e}")
    mpos = bool(np.all(table.multiplicities > 0))
    msum = float(abs(table.multiplicities.sum() - table.n))
    checks["multiplicities"] = mpos and msum <= tol * table.n
    if not checks["multiplicities"]:
        messages.append("multiplicities are nonpositive or do not sum to n")
    ortho = verify_orthogonality(table, tol=tol)
    checks["orthogonality"] = ortho.passed
    if not ortho.passed:
        messages.append(f"orthogonality residual {ortho.max_residual:.2e} above {tol:.0e}")
    passed = all(checks.values())
    return CandidateReport(passed, checks, eig_res, ortho, messages)


# closed forms for q = 2^r


def _require_even_prime_power(q: int) -> int:
    try:
        p, r = factor_prime_power(q)
    except Exception:
        raise UnsupportedQ(f"{q} is not a power of 2") from None
    if p != 2:
        raise UnsupportedQ(f"closed form requires q = 2^r, got q = {q}")
    return r


def _block_table(q: int, corner: list, a_scale: float, b_scale: float,
                 row1_a: float, row1_b: float, col1_a: float,
                 col1_b: float) -> np.ndarray:
    """Common block layout shared by the two closed-form families.

    Rows and columns: 0, 1, then q/2 of type a, then (q-2)/2 of type b.
    corner supplies the top-left 2x2; a_kl = -q(sigma^kl + sigma^-kl) with
    sigma = exp(2 pi i / (q+1)), b_mn = q(rho^mn + rho^-mn) with
    rho = exp(2 pi i / (q-1))."""
    na, nb = q // 2, (q - 2) // 2
    size = 2 + na + nb
    P = np.zeros((size, size), dtype=np.complex128)
    P[0, 0], P[0, 1] = corner[0]
    P[1, 0], P[1, 1] = corner[1]
    P[0, 2:2 + na] = corner[2]
    P[0, 2 + na:] = corner[3]
    P[1, 2:2 + na] = row1_a
    P[1, 2 + na:] = row1_b
    P[2:2 + na, 0] = 1.0
    P[2 + na:, 0] = 1.0
    P[2:2 + na, 1] = col1_a
    P[2 + na:, 1] = col1_b
    for ki in range(1, na + 1):
        for li in range(1, na + 1):
            akl = -2.0 * q * math.cos(2.0 * math.pi * ki * li / (q + 1))
            P[1 + ki, 1 + li] = a_scale * akl
    for mi in range(1, nb + 1):
        for ni in range(1, nb + 1):
            bmn = 2.0 * q * math.cos(2.0 * math.pi * mi * ni / (q - 1))
            P[1 + na + mi, 1 + na + ni] = b_scale * bmn
    return _snap_near_integers(P)


def _snap_near_integers(values: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Round entries that sit within tol of an integer; the closed forms
    produce exact integers polluted only by cosine rounding."""
    rounded = np.round(values.real)
    close = (np.abs(values.real - rounded) < tol) & (np.abs(values.imag) < tol)
    out = values.copy()
    out[close] = rounded[close]
    return out


def closed_form_mstar(q: int) -> CharacterTable:
    """Reference character table of the simple Moufang loop scheme, q = 2^r.

    Block form: valencies (1, q^6-1, then q/2 columns of q^6-q^3, then
    (q-2)/2 columns of q^6+q^3); second row (1, q^2-1, -q^3+q^2, q^3+q^2);
    a-rows (1, -q^3-1, q^2 a_kl, 0); b-rows (1, q^3-1, 0, q^2 b_mn)."""
    _require_even_prime_power(q)
    q2, q3, q6 = q * q, q ** 3, q ** 6
    corner = [(1.0, float(q6 - 1)), (1.0, float(q2 - 1)),
              float(q6 - q3), float(q6 + q3)]
    P = _block_table(q, corner, a_scale=float(q2), b_scale=float(q2),
                     row1_a=float(-q3 + q2), row1_b=float(q3 + q2),
                     col1_a=float(-q3 - 1), col1_b=float(q3 - 1))
    n = q3 * (q ** 4 - 1)
    valencies = np.real(P[0]).round().astype(np.int64)
    m = _snap_near_integers(multiplicities(P, valencies, n) + 0j).real
    return CharacterTable(P, valencies, m, n)


def closed_form_psl2(q: int) -> CharacterTable:
    """Reference character table of the 2-transitive PSL(2, q) group scheme,
    q = 2^r: valencies (1, q^2-1, q^2-q ..., q^2+q ...); second row
    (1, 0, -q+1, q+1); a-rows (1, -q-1, a_kl, 0); b-rows (1, q-1, 0, b_mn)."""
    _require_even_prime_power(q)
    q2 = q * q
    corner = [(1.0, float(q2 - 1)), (1.0, 0.0), float(q2 - q), float(q2 + q)]
    P = _block_table(q, corner, a_scale=1.0, b_scale=1.0,
                     row1_a=float(-q + 1), row1_b=float(q + 1),
                     col1_a=float(-q - 1), col1_b=float(q - 1))
    n = q * (q2 - 1)
    valencies = np.real(P[0]).round().astype(np.int64)
    m = _snap_near_integers(multiplicities(P, valencies, n) + 0j).real
    return CharacterTable(P, valencies, m, n)


# transfer to group character tables


@dataclass
class GroupCharacterTable:
    """Ordinary character table recovered from a group scheme: T[i, j] is
    the value of the i-th irreducible character on the j-th conjugacy
    class, with degrees down column 0 and the trivial character on row 0."""

    T: np.ndarray
    class_sizes: np.ndarray
    degrees: np.ndarray
    order: int

    def column_orthogonality_residual(self) -> float:
        # sum_i T[i,j] conj(T[i,j']) = delta |G| / k_j
        T, k, n = self.T, self.class_sizes.astype(np.float64), float(self.order)
        G = T.conj().T @ T
        expected = np.diag(n / k)
        scale = n / np.sqrt(np.outer(k, k))
        return float(np.abs((G - expected) / scale).max())

    def row_orthogonality_residual(self) -> float:
        # sum_j k_j T[i,j] conj(T[i',j]) = delta |G|
        T, k, n = self.T, self.class_sizes.astype(np.float64), float(self.order)
        G = (T * k[None, :]) @ T.conj().T
        return float(np.abs(G - n * np.eye(T.shape[0])).max() / n)

    def verify(self, tol: float = DEFAULT_TOL_COMPARE) -> bool:
        return (self.column_orthogonality_residual() <= tol
                and self.row_orthogonality_residual() <= tol)


def transfer_to_group_table(table: CharacterTable,
                            tol_square: float = DEFAULT_TOL_SQUARE) -> GroupCharacterTable:
    """T = diag(f) P diag(1/k) with f_i = sqrt(m_i).

    Requires every multiplicity to be a perfect square within tol_square;
    schemes whose relations do not come from conjugacy classes of a group
    fail that test and are rejected."""
    m = table.multiplicities
    f = np.sqrt(m).round()
    bad = np.abs(f * f - m).max()
    if bad > tol_square:
        raise NotGroupScheme(
            f"multiplicities are not perfect squares (worst deviation {bad:.2e}); "
            "the scheme does not come from a group")
    k = table.valencies.astype(np.float64)
    T = (table.P / k[None, :]) * f[:, None]
    return GroupCharacterTable(T, table.valencies.copy(), f.astype(np.int64),
                               table.n)


def group_character_table(group: PermutationGroup,
                          seed: int = DEFAULT_SEED) -> GroupCharacterTable:
    """Irreducible characters of a finite group via its conjugacy scheme."""
    table = compute_character_table(group_scheme(group), seed=seed)
    return transfer_to_group_table(table)


# induced trivial characters and double coset parameters


def permutation_character(action: CosetAction) -> np.ndarray:
    """Fixed-point counts of the coset action on conjugacy class
    representatives, i.e. the character of the induced trivial character."""
    classes = action.parent.conjugacy_classes()
    return np.array([action.fixed_points(c[0]) for c in classes],
                    dtype=np.float64)


def _constituent_multiplicities(group: PermutationGroup,
                                gct: GroupCharacterTable,
                                theta: np.ndarray) -> np.ndarray:
    sizes = np.array([len(c) for c in group.conjugacy_classes()],
                     dtype=np.float64)
    return (gct.T.conj() * sizes[None, :]) @ theta / group.order


@dataclass
class GelfandReport:
    passed: bool
    multiplicities: list
    raw: np.ndarray

    def __bool__(self):
        return self.passed


def gelfand_check(group: PermutationGroup, subgroup,
                  gct: GroupCharacterTable | None = None,
                  seed: int = DEFAULT_SEED,
                  tol: float = 1e-6) -> GelfandReport:
    """Whether the induced trivial character is multiplicity-free.

    Pass gct to reuse an already computed group character table."""
    action = coset_action(group, subgroup)
    if gct is None:
        gct = group_character_table(group, seed=seed)
    raw = _constituent_multiplicities(group, gct, permutation_character(action))
    if np.abs(raw.imag).max() > tol:
        raise EigensolverFailure("constituent multiplicities came out complex")
    vals = raw.real
    rounded = np.round(vals)
    if np.abs(vals - rounded).max() > tol:
        raise EigensolverFailure("constituent multiplicities are not integral")
    ints = rounded.astype(np.int64)
    return GelfandReport(bool(np.all((ints == 0) | (ints == 1))),
                         ints.tolist(), vals)


@dataclass
class DoubleCosetTable:
    table: CharacterTable
    constituents: list          # rows of the group table that appear
    theta: np.ndarray           # permutation character values
    part_sizes: list
    orbital_match: "MatchResult"


def double_coset_table(group: PermutationGroup, subgroup,
                       gct: GroupCharacterTable | None = None,
                       seed: int = DEFAULT_SEED,
                       tol: float = DEFAULT_TOL_COMPARE,
                       rho_selection=None) -> DoubleCosetTable:
    """Character table of the coset scheme from group characters alone:
    p_j(i) = (1/|H|) sum_k |H g_j H meet C_k| rho_i(c_k), rho_i running over
    the constituents of the induced trivial character.

    The result is cross-checked against the table computed from the orbital
    scheme of the coset action; disagreement raises MismatchWithOrbitalTable."""
    group.require_enumerated()
    H = sorted(set(int(h) for h in subgroup))
    action = coset_action(group, H)
    if gct is None:
        gct = group_character_table(group, seed=seed)
    theta = permutation_character(action)
    raw = _constituent_multiplicities(group, gct, theta)
    if rho_selection is None:
        rounded = np.round(raw.real)
        if (np.abs(raw.imag).max() > 1e-6
                or np.abs(raw.real - rounded).max() > 1e-6):
            raise EigensolverFailure("constituent multiplicities are not integral")
        ints = rounded.astype(np.int64)
        if np.any(ints > 1):
            raise NotMultiplicityFree(
                "the induced trivial character has a repeated constituent; "
                f"multiplicities {ints.tolist()}")
        selection = np.flatnonzero(ints == 1).tolist()
    else:
        selection = sorted(int(i) for i in rho_selection)
    dc = double_cosets(group, H)
    if len(selection) != len(dc.parts):
        raise NotMultiplicityFree(
            f"{len(selection)} constituents against {len(dc.parts)} double "
            "cosets; the coset scheme cannot be commutative")
    class_of = group.class_of_array()
    n_classes = len(group.conjugacy_classes())
    counts = np.stack([
        np.bincount(class_of[np.asarray(part)], minlength=n_classes)
        for part in dc.parts]).astype(np.float64)
    h_size = len(H)
    rows = gct.T[selection]                       # characters as rows
    P = (rows @ counts.T) / h_size
    # row order: trivial character first, others lexicographic
    triv = int(np.argmin(np.abs(rows - 1.0).max(axis=1)))
    others = [i for i in range(len(selection)) if i != triv]
    keys = _row_sort_keys(P[others])
    order = np.lexsort(keys.T[::-1])
    perm = [triv] + [others[int(i)] for i in order]
    P = P[perm]
    valencies = np.array([len(p) // h_size for p in dc.parts], dtype=np.int64)
    mults = gct.degrees[selection][perm].astype(np.float64)
    table = CharacterTable(P, valencies, mults, action.n_points)
    orbital_table = compute_character_table(orbitals(action.group), seed=seed)
    match = compare_tables(table, orbital_table, tol=tol)
    if not match.matched:
        raise MismatchWithOrbitalTable(
            "double-coset table disagrees with the orbital-scheme table "
            f"(best deviation {match.max_diff:.2e})")
    return DoubleCosetTable(table, [int(selection[i]) for i in perm], theta,
                            dc.sizes, match)


# table comparison up to simultaneous row and column permutation


@dataclass
class MatchResult:
    matched: bool
    row_perm: np.ndarray | None   # P1[i, j] ~ P2[row_perm[i], col_perm[j]]
    col_perm: np.ndarray | None
    max_diff: float

    def __bool__(self):
        return self.matched


def _valency_groups(k1: np.ndarray, k2: np.ndarray):
    groups = []
    for value in sorted(set(k1.tolist())):
        a = np.flatnonzero(k1 == value)
        b = np.flatnonzero(k2 == value)
        if a.shape[0] != b.shape[0]:
            return None
        groups.append((a, b))
    return groups


def _column_permutations(groups, budget: int = 1_000_000):
    """Yield column maps tau with k2[tau[j]] = k1[j], cheapest groups first."""
    import itertools
    total = 1
    for a, _ in groups:
        total *= math.factorial(a.shape[0])
        if total > budget:
            raise EigensolverFailure(
                "too many equal-valency columns to compare exhaustively")
    pools = [itertools.permutations(b.tolist()) for _, b in groups]
    starts = [a.tolist() for a, _ in groups]
    size = sum(len(s) for s in starts)
    for combo in itertools.product(*pools):
        tau = np.empty(size, dtype=np.int64)
        for positions, images in zip(starts, combo):
            for p, im in zip(positions, images):
                tau[p] = im
        yield tau


def compare_tables(t1: CharacterTable, t2: CharacterTable,
                   tol: float = DEFAULT_TOL_COMPARE) -> MatchResult:
    """Match two tables up to row and column permutation.

    Columns may only map to columns of equal valency; rows must agree
    entrywise within tol and carry multiplicities within tol of each other
    (relative to n).  Returns the permutations on success."""
    if t1.d != t2.d or t1.n != t2.n:
        return MatchResult(False, None, None, float("inf"))
    k1, k2 = t1.valencies, t2.valencies
    if sorted(k1.tolist()) != sorted(k2.tolist()):
        return MatchResult(False, None, None, float("inf"))
    groups = _valency_groups(k1, k2)
    if groups is None:
        return MatchResult(False, None, None, float("inf"))
    d1 = t1.d + 1
    m_tol = tol * max(t1.n, 1)
    best = float("inf")
    for tau in _column_permutations(groups):
        P2 = t2.P[:, tau]
        # greedy unique row assignment with backtracking
        diff = np.abs(t1.P[:, None, :] - P2[None, :, :]).max(axis=2)
        mdiff = np.abs(t1.multiplicities[:, None] - t2.multiplicities[None, :])
        allowed = (diff <= tol) & (mdiff <= m_tol)
        best = min(best, float(diff.min(axis=1).max()))
        assignment = _bipartite_match(allowed)
        if assignment is not None:
            sigma = np.array(assignment, dtype=np.int64)
            worst = float(np.abs(t1.P - P2[sigma]).max())
            return MatchResult(True, sigma, np.asarray(tau), worst)
    return MatchResult(False, None, None, best)


def _bipartite_match(allowed: np.ndarray):
    n = allowed.shape[0]
    match_of_right = [-1] * n

    def try_assign(i, visited):
        for j in range(n):
            if allowed[i, j] and not visited[j]:
                visited[j] = True
                if match_of_right[j] < 0 or try_assign(match_of_right[j], visited):
                    match_of_right[j] = i
                    return True
        return False

    for i in range(n):
        if not try_assign(i, [False] * n):
            return None
    out = [0] * n
    for j, i in enumerate(match_of_right):
        out[i] = j
    return out


# plain-text, CSV and LaTeX renderings of a table


IMAG_CUTOFF = 1e-12


def format_complex(z: complex, digits: int | None = None) -> str:
    """Render a+bi, dropping the imaginary part when |b| < 1e-12.

    With digits=None the shortest round-tripping float repr is used, which
    keeps CSV exports importable to full precision."""
    re, im = float(z.real), float(z.imag)

    def num(x: float) -> str:
        return repr(x) if digits is None else f"{x:.{digits}g}"

    if abs(im) < IMAG_CUTOFF:
        return num(re)
    sign = "+" if im >= 0 else "-"
    return f"{num(re)}{sign}{num(abs(im))}i"


def parse_complex(cell: str) -> complex:
    text = cell.strip()
    try:
        if text.endswith("i"):
            return complex(text[:-1].replace(" ", "") + "j")
        return complex(float(text))
    except ValueError:
        raise ParseError(f"bad complex entry {cell!r}") from None


def table_to_csv(table: CharacterTable) -> str:
    """Labeled-row CSV; every numeric field round-trips exactly."""
    lines = ["kind,character-table",
             f"n,{table.n}",
             "valencies," + ",".join(str(int(k)) for k in table.valencies),
             "multiplicities," + ",".join(repr(float(m))
                                          for m in table.multiplicities)]
    for row in table.P:
        lines.append("P," + ",".join(format_complex(z) for z in row))
    return "\n".join(lines) + "\n"


def table_from_csv(text: str) -> CharacterTable:
    n = None
    valencies = None
    mults = None
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        label, _, rest = line.partition(",")
        try:
            if label == "kind":
                if rest.strip() != "character-table":
                    raise ParseError(f"unexpected kind {rest.strip()!r}",
                                     line=lineno)
            elif label == "n":
                n = int(rest)
            elif label == "valencies":
                valencies = [int(tok) for tok in rest.split(",")]
            elif label == "multiplicities":
                mults = [float(tok) for tok in rest.split(",")]
            elif label == "P":
                rows.append([parse_complex(tok) for tok in rest.split(",")])
            else:
                raise ParseError(f"unknown row label {label!r}", line=lineno)
        except ValueError:
            raise ParseError(f"bad numeric field in {label!r} row",
                             line=lineno) from None
    if n is None or valencies is None or mults is None or not rows:
        raise ParseError("table CSV is missing n, valencies, multiplicities or P rows")
    if any(len(r) != len(rows) for r in rows):
        raise ParseError("table CSV P rows do not form a square matrix")
    return CharacterTable(np.array(rows, dtype=np.complex128),
                          valencies, mults, n)


def table_to_latex(table: CharacterTable, digits: int = 6) -> str:
    """LaTeX array, valency row first, one character per row."""
    cols = "c" * (table.d + 1)
    lines = [r"\left(\begin{array}{" + cols + "}"]
    body = []
    for row in table.P:
        cells = [format_complex(z, digits).replace("i", r"\,i")
                 for z in row]
        body.append(" & ".join(cells))
    lines.append(" \\\\\n".join(body))
    lines.append(r"\end{array}\right)")
    return "\n".join(lines) + "\n"


def table_to_text(table: CharacterTable, digits: int = 6) -> str:
    """Aligned plain-text table: the valency row first, then each character."""
    cells = [[format_complex(z, digits) for z in row] for row in table.P]
    widths = [max(len(cells[i][j]) for i in range(len(cells)))
              for j in range(len(cells))]
    lines = [f"character table: n={table.n}, d={table.d}"]
    for i, row in enumerate(cells):
        tag = "k" if i == 0 else f"{i}"
        lines.append(f"  {tag:>2}  " + "  ".join(c.rjust(w)
                                                 for c, w in zip(row, widths)))
    lines.append("  m   " + "  ".join(f"{m:.6g}"
                                      for m in table.multiplicities))
    return "\n".join(lines) + "\n"
