"""Association schemes: relation storage, intersection numbers, axioms, fusion.

A scheme on n points with d+1 classes stores its relation either as a dense
n x n class-index matrix or as a pair of row/column functions for sizes where
the matrix would not fit.  Intersection numbers are counted from representative
pairs; disagreement between representatives is the definitive signal that the
input partition is not a scheme.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_SEED, DENSE_RELATION_LIMIT
from .errors import InvalidFusion, NotAScheme


def _class_dtype(d: int):
    return np.uint8 if d < 255 else np.uint16


class AssociationScheme:
    """Partition of X x X into classes R_0..R_d with R_0 the diagonal."""

    def __init__(self, n, d, valencies, transpose_map, matrix=None,
                 row_fn=None, col_fn=None, source=None):
        self.n = int(n)
        self.d = int(d)
        self.valencies = np.asarray(valencies, dtype=np.int64)
        self.transpose_map = np.asarray(transpose_map, dtype=np.int64)
        if self.valencies.shape != (self.d + 1,):
            raise ValueError("valencies must have one entry per class")
        if self.transpose_map.shape != (self.d + 1,):
            raise ValueError("transpose map must have one entry per class")
        self._matrix = matrix
        self._row_fn = row_fn
        self._col_fn = col_fn
        self.source = source
        if matrix is None and (row_fn is None or col_fn is None):
            raise ValueError("need either a dense matrix or row and column functions")

    @classmethod
    def from_matrix(cls, matrix, source=None) -> "AssociationScheme":
        matrix = np.asarray(matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"relation matrix must be square, got {matrix.shape}")
        n = matrix.shape[0]
        d = int(matrix.max())
        matrix = matrix.astype(_class_dtype(d), copy=False)
        valencies = np.bincount(matrix[0].astype(np.int64), minlength=d + 1)
        transpose = np.arange(d + 1, dtype=np.int64)
        row0 = matrix[0]
        for i in range(d + 1):
            hits = np.flatnonzero(row0 == i)
            if hits.size:
                transpose[i] = matrix[hits[0], 0]
        return cls(n, d, valencies, transpose, matrix=matrix, source=source)

    # relation access

    @property
    def is_dense(self) -> bool:
        return self._matrix is not None

    def rel(self, x: int, y: int) -> int:
        if self._matrix is not None:
            return int(self._matrix[x, y])
        return int(self._row_fn(x)[y])

    def rel_row(self, x: int) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix[x]
        return self._row_fn(x)

    def rel_col(self, y: int) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix[:, y]
        return self._col_fn(y)

    def dense_matrix(self) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix
        mat = np.empty((self.n, self.n), dtype=_class_dtype(self.d))
        for x in range(self.n):
            mat[x] = self.rel_row(x)
        return mat

    def __repr__(self):
        kind = "dense" if self.is_dense else "functional"
        return f"AssociationScheme(n={self.n}, d={self.d}, {kind})"

    # serialization; functional schemes need a source descriptor to round-trip

    def to_json(self) -> dict:
        body = {"n": self.n, "d": self.d, "valencies": self.valencies.tolist()}
        if self.is_dense:
            body["relations"] = {"matrix": self._matrix.astype(int).tolist()}
        elif self.source is not None:
            body["relations"] = {"source": self.source}
        else:
            raise ValueError("functional scheme without a source descriptor cannot be serialized")
        return body

    @classmethod
    def from_json(cls, data: dict) -> "AssociationScheme":
        rel = data["relations"]
        if "matrix" not in rel:
            raise ValueError("only matrix-backed scheme JSON can be loaded here")
        built = cls.from_matrix(np.asarray(rel["matrix"]))
        if built.n != int(data["n"]) or built.d != int(data["d"]):
            raise ValueError("scheme JSON header disagrees with its matrix")
        if built.valencies.tolist() != [int(v) for v in data["valencies"]]:
            raise ValueError("scheme JSON valencies disagree with its matrix")
        return built


class IntersectionNumbers:
    """The tensor p_ij^h together with the derived matrices B_i.

    tensor[h, i, j] = p_ij^h, so B_i = tensor[:, i, :] has (B_i)[h][j] = p_ij^h.
    """

    def __init__(self, tensor: np.ndarray, valencies: np.ndarray, n: int):
        self.tensor = tensor
        self.valencies = np.asarray(valencies, dtype=np.int64)
        self.n = int(n)
        self._commutes = None

    @property
    def d(self) -> int:
        return self.tensor.shape[0] - 1

    def p(self, i: int, j: int, h: int) -> int:
        return int(self.tensor[h, i, j])

    def B(self, i: int) -> np.ndarray:
        return self.tensor[:, i, :]

    @property
    def b_matrices(self) -> list[np.ndarray]:
        return [self.B(i) for i in range(self.d + 1)]

    @property
    def commutes(self) -> bool:
        """Exact integer check that all B_i pairwise commute."""
        if self._commutes is None:
            mats = [m.astype(np.int64) for m in self.b_matrices]
            ok = True
            for i in range(len(mats)):
                for j in range(i + 1, len(mats)):
                    if not np.array_equal(mats[i] @ mats[j], mats[j] @ mats[i]):
                        ok = False
                        break
                if not ok:
                    break
            self._commutes = ok
        return self._commutes


def _collect_representatives(scheme: AssociationScheme, reps_per_class: int):
    """Deterministic representative pairs: scan rows upward, first hit per class."""
    d = scheme.d
    reps: list[list[tuple[int, int]]] = [[] for _ in range(d + 1)]
    missing = d + 1
    limit = min(scheme.n, max(4 * reps_per_class, 32))
    for x in range(scheme.n):
        row = scheme.rel_row(x)
        classes, first = np.unique(row, return_index=True)
        for h, y in zip(classes.tolist(), first.tolist()):
            bucket = reps[h]
            if len(bucket) < reps_per_class:
                bucket.append((x, int(y)))
                if len(bucket) == reps_per_class:
                    missing -= 1
        if missing == 0 or x + 1 >= limit:
            break
    empty = [h for h in range(d + 1) if not reps[h]]
    if empty:
        raise NotAScheme(f"classes {empty} have no representative pair in the scanned rows")
    return reps


def _counts_for_pair(scheme: AssociationScheme, x: int, y: int, d: int) -> np.ndarray:
    i_vec = scheme.rel_row(x).astype(np.int64)
    j_vec = scheme.rel_col(y).astype(np.int64)
    counts = np.bincount(i_vec * (d + 1) + j_vec, minlength=(d + 1) ** 2)
    return counts.reshape(d + 1, d + 1)


def intersection_numbers(scheme: AssociationScheme, reps_per_class: int = 3,
                         exhaustive_limit: int = 300) -> IntersectionNumbers:
    """Count p_ij^h from representative pairs of each class.

    Every representative of a class must give identical counts; a mismatch
    raises NotAScheme naming the offending class and pair.  Schemes with at
    most `exhaustive_limit` points are checked over all n^2 pairs.
    """
    d, n = scheme.d, scheme.n
    tensor = np.full((d + 1, d + 1, d + 1), -1, dtype=np.int64)

    if n <= exhaustive_limit:
        mat = scheme.dense_matrix().astype(np.int64)
        span = (d + 1) ** 2
        for x in range(n):
            row = mat[x]
            # codes[z, y] encodes the pair (rel(x,z), rel(z,y)); one bincount per row
            codes = row[:, None] * (d + 1) + mat
            flat = (np.arange(n, dtype=np.int64) * span)[None, :] + codes
            counts = np.bincount(flat.ravel(), minlength=n * span).reshape(n, d + 1, d + 1)
            for y in range(n):
                h = int(row[y])
                if tensor[h, 0, 0] < 0:
                    tensor[h] = counts[y]
                elif not np.array_equal(tensor[h], counts[y]):
                    raise NotAScheme(
                        f"class {h}: intersection numbers at pair ({x}, {y}) "
                        f"disagree with an earlier representative")
        return IntersectionNumbers(tensor, scheme.valencies, n)

    reps = _collect_representatives(scheme, reps_per_class)
    for h in range(d + 1):
        for x, y in reps[h]:
            counts = _counts_for_pair(scheme, x, y, d)
            if tensor[h, 0, 0] < 0:
                tensor[h] = counts
            elif not np.array_equal(tensor[h], counts):
                raise NotAScheme(
                    f"class {h}: intersection numbers at pair ({x}, {y}) "
                    f"disagree with an earlier representative")
    return IntersectionNumbers(tensor, scheme.valencies, n)


@dataclass
class SchemeReport:
    """Outcome of the axiom verification pass."""

    passed: bool
    failures: list[str] = field(default_factory=list)
    intersection: IntersectionNumbers | None = None

    def __bool__(self):
        return self.passed


def verify_scheme_axioms(scheme: AssociationScheme, reps_per_class: int = 3,
                         max_rows: int = 40, seed: int = DEFAULT_SEED) -> SchemeReport:
    """Check diagonal class, row regularity, transpose closure and
    representative independence of the intersection numbers."""
    n, d = scheme.n, scheme.d
    k = scheme.valencies
    failures: list[str] = []

    if k[0] != 1:
        failures.append(f"diagonal class has valency {k[0]}, expected 1")
    if int(k.sum()) != n:
        failures.append(f"valencies sum to {int(k.sum())}, expected n={n}")

    if n <= 600:
        rows = range(n)
    else:
        rng = np.random.default_rng(seed)
        extra = rng.choice(n - 3, size=min(max_rows, n) - 3, replace=False) + 3
        rows = [0, 1, 2] + sorted(int(r) for r in extra)

    class_reps: list[list[tuple[int, int]]] = [[] for _ in range(d + 1)]
    for x in rows:
        row = scheme.rel_row(x)
        if row[x] != 0:
            failures.append(f"rel({x},{x}) = {int(row[x])}, diagonal must be class 0")
            break
        counts = np.bincount(row.astype(np.int64), minlength=d + 1)
        if counts.shape[0] > d + 1 or not np.array_equal(counts[:d + 1], k):
            failures.append(
                f"row {x} class counts {counts.tolist()} differ from valencies {k.tolist()}")
            break
        classes, first = np.unique(row, return_index=True)
        for h, y in zip(classes.tolist(), first.tolist()):
            if len(class_reps[h]) < 3:
                class_reps[h].append((x, int(y)))

    tm = scheme.transpose_map
    perm_ok = sorted(tm.tolist()) == list(range(d + 1))
    if not perm_ok:
        failures.append(f"transpose map {tm.tolist()} is not a permutation of the classes")
    for i in range(d + 1):
        if perm_ok and k[tm[i]] != k[i]:
            failures.append(f"valency of class {i} differs from its transpose {int(tm[i])}")
        for x, y in class_reps[i]:
            back = scheme.rel(y, x)
            if back != tm[i]:
                failures.append(
                    f"rel({y},{x}) = {back} but transpose of class {i} is {int(tm[i])}")
                break

    inter = None
    if not failures:
        try:
            inter = intersection_numbers(scheme, reps_per_class=reps_per_class)
        except NotAScheme as exc:
            failures.append(str(exc))

    return SchemeReport(passed=not failures, failures=failures, intersection=inter)


def fuse(scheme: AssociationScheme, cells, reps_per_class: int = 3,
         dense_limit: int = DENSE_RELATION_LIMIT) -> AssociationScheme:
    """Merge classes along a partition of {0..d}; the result must again be a scheme.

    Cell validation (class 0 isolated, transpose closure, true partition) and
    the representative-independence check of the fused intersection numbers
    all raise InvalidFusion on failure.
    """
    d = scheme.d
    norm = [tuple(sorted(int(c) for c in cell)) for cell in cells]
    flat = [c for cell in norm for c in cell]
    if sorted(flat) != list(range(d + 1)):
        raise InvalidFusion(f"cells {norm} are not a partition of the classes 0..{d}")
    for cell in norm:
        if 0 in cell and cell != (0,):
            raise InvalidFusion("class 0 must remain a singleton cell")
    cell_sets = {cell: set(cell) for cell in norm}
    tm = scheme.transpose_map
    for cell in norm:
        image = frozenset(int(tm[c]) for c in cell)
        if image not in {frozenset(s) for s in cell_sets.values()}:
            raise InvalidFusion(
                f"cell {cell} maps to {sorted(image)} under transposition, "
                "which is not a cell; fused relation would not be transpose-closed")

    norm.sort(key=lambda cell: cell[0])
    remap = np.zeros(d + 1, dtype=np.int64)
    for new, cell in enumerate(norm):
        for c in cell:
            remap[c] = new
    new_d = len(norm) - 1
    new_k = np.array([int(scheme.valencies[list(cell)].sum()) for cell in norm], dtype=np.int64)
    new_tm = np.array([remap[tm[cell[0]]] for cell in norm], dtype=np.int64)

    if scheme.is_dense and scheme.n <= dense_limit:
        fused = AssociationScheme.from_matrix(
            remap[scheme.dense_matrix().astype(np.int64)].astype(_class_dtype(new_d)))
        fused.source = {"kind": "fusion", "cells": [list(c) for c in norm],
                        "base": scheme.source}
    else:
        cast = remap.astype(_class_dtype(new_d))
        row_fn = lambda x: cast[scheme.rel_row(x).astype(np.int64)]  # noqa: E731
        col_fn = lambda y: cast[scheme.rel_col(y).astype(np.int64)]  # noqa: E731
        fused = AssociationScheme(
            scheme.n, new_d, new_k, new_tm, row_fn=row_fn, col_fn=col_fn,
            source={"kind": "fusion", "cells": [list(c) for c in norm],
                    "base": scheme.source})

    report = verify_scheme_axioms(fused, reps_per_class=reps_per_class)
    if not report.passed:
        raise InvalidFusion("fused partition is not a scheme: " + "; ".join(report.failures))
    return fused


def complete_graph_scheme(n: int) -> AssociationScheme:
    """Two-class scheme of the complete graph on n points."""
    if n < 2:
        raise ValueError("complete graph scheme needs at least 2 points")
    mat = np.ones((n, n), dtype=np.uint8) - np.eye(n, dtype=np.uint8)
    return AssociationScheme.from_matrix(mat, source={"kind": "complete-graph", "n": n})


def scheme_to_csv(scheme: AssociationScheme) -> str:
    """Labeled-row CSV of a dense scheme; functional schemes have no cell
    matrix to dump, use JSON with a source descriptor instead."""
    if not scheme.is_dense:
        raise ValueError("CSV export needs a dense relation matrix; "
                         "use JSON for function-backed schemes")
    lines = ["kind,scheme",
             f"n,{scheme.n}",
             f"d,{scheme.d}",
             "valencies," + ",".join(str(int(k)) for k in scheme.valencies)]
    for row in scheme.dense_matrix():
        lines.append("R," + ",".join(str(int(c)) for c in row))
    return "\n".join(lines) + "\n"


def scheme_from_csv(text: str) -> AssociationScheme:
    from .errors import ParseError
    n = d = None
    valencies = None
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        label, _, rest = line.partition(",")
        try:
            if label == "kind":
                if rest.strip() != "scheme":
                    raise ParseError(f"unexpected kind {rest.strip()!r}", line=lineno)
            elif label == "n":
                n = int(rest)
            elif label == "d":
                d = int(rest)
            elif label == "valencies":
                valencies = [int(tok) for tok in rest.split(",")]
            elif label == "R":
                rows.append([int(tok) for tok in rest.split(",")])
            else:
                raise ParseError(f"unknown row label {label!r}", line=lineno)
        except ValueError:
            raise ParseError(f"bad integer field in {label!r} row", line=lineno) from None
    if n is None or d is None or valencies is None or not rows:
        raise ParseError("scheme CSV is missing n, d, valencies or R rows")
    built = AssociationScheme.from_matrix(np.asarray(rows))
    if built.n != n or built.d != d or built.valencies.tolist() != valencies:
        raise ParseError("scheme CSV header disagrees with its matrix")
    return built
