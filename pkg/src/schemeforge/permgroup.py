"""Permutations on {0..n-1}, small-group enumeration, orbit machinery.

Composition convention: (p * q) applies p first, then q, so the image array
of p * q is q.images[p.images].  All group actions here are right actions,
matching that convention (acting by a matrix product M N means acting by M
first).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CLOSURE_CAP, DEFAULT_RELATION_CAP
from .errors import (CapExceeded, NotEnumerated, NotSubgroup, NotTransitive,
                     ParseError)
from .gf import field_for
from .scheme import AssociationScheme, _class_dtype


class Permutation:
    """Immutable permutation stored as a tuple of images."""

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(int(i) for i in images)
        self.images = images

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(range(degree))

    @classmethod
    def from_cycles(cls, cycles, degree: int) -> "Permutation":
        images = list(range(degree))
        for cycle in cycles:
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                images[a] = b
        return cls(images)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __mul__(self, other: "Permutation") -> "Permutation":
        # apply self first, then other
        o = other.images
        return Permutation(tuple(o[i] for i in self.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, img in enumerate(self.images):
            inv[img] = i
        return Permutation(inv)

    def __call__(self, point: int) -> int:
        return self.images[point]

    @property
    def is_identity(self) -> bool:
        return all(i == img for i, img in enumerate(self.images))

    def as_array(self) -> np.ndarray:
        return np.array(self.images, dtype=np.int64)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation({list(self.images)})"


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_generator_line(line: str, degree: int | None = None,
                         lineno: int | None = None) -> "Permutation | list[list[int]]":
    """One generator: either an image list '2 0 1' or cycles '(0 1 2)(3 4)'.

    Cycle lines return the raw cycle lists because their degree may only be
    known once the whole file is read.
    """
    text = line.strip()
    if text.startswith("("):
        tail = _CYCLE_RE.sub("", text).strip()
        if tail:
            raise ParseError(f"stray text {tail!r} outside cycles", line=lineno)
        cycles = []
        seen: set[int] = set()
        for body in _CYCLE_RE.findall(text):
            pts = [p for p in re.split(r"[,\s]+", body.strip()) if p]
            try:
                cyc = [int(p) for p in pts]
            except ValueError:
                raise ParseError(f"non-integer point in cycle {body!r}", line=lineno) from None
            if any(p < 0 for p in cyc):
                raise ParseError("cycle points must be non-negative", line=lineno)
            if seen & set(cyc) or len(set(cyc)) != len(cyc):
                raise ParseError("point repeated across cycles", line=lineno)
            seen |= set(cyc)
            if len(cyc) > 1:
                cycles.append(cyc)
        return cycles
    try:
        images = [int(p) for p in text.split()]
    except ValueError:
        raise ParseError(f"expected an image list or cycles, got {text!r}",
                         line=lineno) from None
    if degree is not None and len(images) != degree:
        raise ParseError(f"image list has length {len(images)}, expected {degree}",
                         line=lineno)
    if sorted(images) != list(range(len(images))):
        raise ParseError(f"{images} is not a permutation of 0..{len(images) - 1}",
                         line=lineno)
    return Permutation(images)


def parse_generators(text: str, degree: int | None = None) -> list[Permutation]:
    """Parse a generator file: one permutation per line, '#' comments allowed."""
    raw: list[tuple[int, object]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        raw.append((lineno, parse_generator_line(body, degree=degree, lineno=lineno)))
    if not raw:
        raise ParseError("no generators found")
    inferred = degree
    if inferred is None:
        inferred = 0
        for _, item in raw:
            if isinstance(item, Permutation):
                inferred = max(inferred, item.degree)
            else:
                inferred = max(inferred, max((p + 1 for c in item for p in c), default=1))
    gens = []
    for lineno, item in raw:
        if isinstance(item, Permutation):
            if item.degree != inferred:
                raise ParseError(
                    f"image list of length {item.degree} in a degree-{inferred} file",
                    line=lineno)
            gens.append(item)
        else:
            top = max((p for c in item for p in c), default=-1)
            if top >= inferred:
                raise ParseError(f"cycle point {top} outside 0..{inferred - 1}", line=lineno)
            gens.append(Permutation.from_cycles(item, inferred))
    return gens


def load_generators(path, degree: int | None = None) -> list[Permutation]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_generators(fh.read(), degree=degree)


class PermutationGroup:
    """Generators plus, when enumerated, the full ordered element list.

    Enumeration order is canonical: identity first, then breadth-first
    discovery order of `closure`.  Index-level helpers (mul_idx, inv_idx)
    require enumeration.
    """

    def __init__(self, generators, elements=None, index=None):
        gens = [g if isinstance(g, Permutation) else Permutation(g) for g in generators]
        if not gens:
            raise ValueError("a permutation group needs at least one generator")
        deg = gens[0].degree
        if any(g.degree != deg for g in gens):
            raise ValueError("generators act on different point sets")
        self.generators = tuple(gens)
        self.degree = deg
        self.elements: list[Permutation] | None = elements
        self._index: dict[tuple, int] | None = index
        if elements is not None and index is None:
            self._index = {e.images: i for i, e in enumerate(elements)}
        self._mul_table: np.ndarray | None = None
        self._inv_array: np.ndarray | None = None
        self._classes: list[list[int]] | None = None
        self._images_matrix: np.ndarray | None = None
        self._sorted_keys = None

    @property
    def enumerated(self) -> bool:
        return self.elements is not None

    @property
    def order(self) -> int:
        self.require_enumerated()
        return len(self.elements)

    def require_enumerated(self):
        if self.elements is None:
            raise NotEnumerated("operation requires the enumerated element list; "
                                "build the group with closure()")

    def element_index(self, perm: Permutation) -> int:
        self.require_enumerated()
        try:
            return self._index[perm.images]
        except KeyError:
            raise ValueError(f"{perm!r} is not an element of this group") from None

    # vectorized image-row lookup

    def _point_dtype(self):
        return np.uint8 if self.degree <= 255 else np.uint16

    def _images(self) -> np.ndarray:
        if self._images_matrix is None:
            self.require_enumerated()
            self._images_matrix = np.array(
                [e.images for e in self.elements], dtype=self._point_dtype())
        return self._images_matrix

    def _rows_to_indices(self, rows: np.ndarray) -> np.ndarray:
        """Map image rows back to element indices via a sorted void-key view."""
        imgs = self._images()
        if self._sorted_keys is None:
            keys = np.ascontiguousarray(imgs).view(
                np.dtype((np.void, imgs.dtype.itemsize * self.degree))).ravel()
            order = np.argsort(keys)
            self._sorted_keys = (keys[order], order)
        keys, order = self._sorted_keys
        rows = np.ascontiguousarray(rows.astype(imgs.dtype, copy=False))
        probe = rows.view(np.dtype((np.void, rows.dtype.itemsize * self.degree))).ravel()
        pos = np.searchsorted(keys, probe)
        if np.any(pos >= keys.shape[0]) or np.any(keys[np.minimum(pos, keys.shape[0] - 1)] != probe):
            raise ValueError("row is not an element of this group")
        return order[pos]

    # index-level operations

    def mul_idx(self, i: int, j: int) -> int:
        if self._mul_table is not None:
            return int(self._mul_table[i, j])
        self.require_enumerated()
        prod = self.elements[i] * self.elements[j]
        return self._index[prod.images]

    def inv_idx(self, i: int) -> int:
        return int(self.inv_array()[i])

    def inv_array(self) -> np.ndarray:
        if self._inv_array is None:
            self.require_enumerated()
            self._inv_array = np.array(
                [self._index[e.inverse().images] for e in self.elements], dtype=np.int64)
        return self._inv_array

    def mul_table(self, limit: int = 4096) -> np.ndarray:
        """Full index-level multiplication table; small groups only."""
        if self._mul_table is None:
            self.require_enumerated()
            n = len(self.elements)
            if n > limit:
                raise CapExceeded(f"multiplication table for {n} elements exceeds limit {limit}")
            imgs = self._images()
            table = np.empty((n, n), dtype=np.int32)
            for i in range(n):
                # (e_i * e_j).images = imgs[j][imgs[i]], all j at once
                composed = imgs[:, imgs[i].astype(np.int64)]
                table[i] = self._rows_to_indices(composed)
            self._mul_table = table
        return self._mul_table

    def generator_indices(self) -> list[int]:
        self.require_enumerated()
        return [self._index[g.images] for g in self.generators]

    # conjugacy classes, ordered by (size, minimal element index)

    def conjugacy_classes(self) -> list[list[int]]:
        if self._classes is None:
            self.require_enumerated()
            n = len(self.elements)
            gen_idx = self.generator_indices()
            inv = self.inv_array()
            assigned = np.zeros(n, dtype=bool)
            classes = []
            for g in range(n):
                if assigned[g]:
                    continue
                orbit = [g]
                assigned[g] = True
                head = 0
                while head < len(orbit):
                    x = orbit[head]
                    head += 1
                    for s in gen_idx:
                        y = self.mul_idx(self.mul_idx(int(inv[s]), x), s)
                        if not assigned[y]:
                            assigned[y] = True
                            orbit.append(y)
                classes.append(sorted(orbit))
            classes.sort(key=lambda c: (len(c), c[0]))
            self._classes = classes
        return self._classes

    def class_of_array(self) -> np.ndarray:
        classes = self.conjugacy_classes()
        out = np.empty(self.order, dtype=np.int64)
        for cid, members in enumerate(classes):
            out[members] = cid
        return out

    def __repr__(self):
        size = len(self.elements) if self.enumerated else "?"
        return f"PermutationGroup(degree={self.degree}, order={size})"


def closure(generators, cap: int = DEFAULT_CLOSURE_CAP) -> PermutationGroup:
    """Breadth-first closure under right multiplication by the generators.

    Element order is deterministic: identity first, then discovery order.
    """
    gens = [g if isinstance(g, Permutation) else Permutation(g) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    deg = gens[0].degree
    if any(g.degree != deg for g in gens):
        raise ValueError("generators act on different point sets")
    ident = Permutation.identity(deg)
    elements = [ident]
    index = {ident.images: 0}
    head = 0
    while head < len(elements):
        x = elements[head]
        head += 1
        for s in gens:
            y = x * s
            if y.images not in index:
                if len(elements) >= cap:
                    raise CapExceeded(f"group closure exceeded the cap of {cap} elements")
                index[y.images] = len(elements)
                elements.append(y)
    return PermutationGroup(gens, elements, index)


# point and pair orbits


def point_orbit(gen_arrays: np.ndarray, n: int, start: int = 0) -> np.ndarray:
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    frontier = np.array([start], dtype=np.int64)
    while frontier.size:
        imgs = gen_arrays[:, frontier].ravel()
        imgs = np.unique(imgs)
        new = imgs[~seen[imgs]]
        seen[new] = True
        frontier = new
    return np.flatnonzero(seen)


def pair_orbits(gen_arrays: np.ndarray, n: int) -> tuple[np.ndarray, int]:
    """Orbit ids of the diagonal action on pairs, in first-touch order.

    Returns (orbit_id array of length n*n indexed by u*n+v, orbit count).
    Orbit ids increase with the smallest pair code they contain.
    """
    gens = np.asarray(gen_arrays, dtype=np.int64)
    total = n * n
    orbit_id = np.full(total, -1, dtype=np.int64)
    next_id = 0
    cursor = 0
    chunk = 1 << 16
    while cursor < total:
        if orbit_id[cursor] >= 0:
            pos = cursor
            while pos < total:
                seg = orbit_id[pos:pos + chunk]
                hits = np.flatnonzero(seg < 0)
                if hits.size:
                    pos += int(hits[0])
                    break
                pos += seg.shape[0]
            cursor = pos
            if cursor >= total:
                break
        orbit_id[cursor] = next_id
        frontier = np.array([cursor], dtype=np.int64)
        # the frontier is expanded in slices so the gather stays bounded
        # even when thousands of generators meet a frontier of n^2 scale
        slice_len = max(1, 4_000_000 // gens.shape[0])
        while frontier.size:
            parts = []
            for start in range(0, frontier.size, slice_len):
                piece = frontier[start:start + slice_len]
                u, v = np.divmod(piece, n)
                imgs = (gens[:, u] * n + gens[:, v]).ravel()
                imgs = np.unique(imgs)
                new = imgs[orbit_id[imgs] < 0]
                if new.size:
                    orbit_id[new] = next_id
                    parts.append(new)
            if parts:
                frontier = np.concatenate(parts) if len(parts) > 1 else parts[0]
            else:
                frontier = np.empty(0, dtype=np.int64)
        next_id += 1
    return orbit_id, next_id


def orbitals(group: PermutationGroup, n_points: int | None = None,
             relation_cap: int = DEFAULT_RELATION_CAP) -> AssociationScheme:
    """Scheme of the orbits of a transitive group on ordered pairs of points."""
    n = group.degree
    if n_points is not None and n_points != n:
        raise ValueError(f"group acts on {n} points, not {n_points}")
    if n * n > relation_cap:
        raise CapExceeded(f"{n}^2 relation entries exceed the cap {relation_cap}")
    gen_arrays = np.array([g.images for g in group.generators], dtype=np.int64)
    if point_orbit(gen_arrays, n).shape[0] != n:
        raise NotTransitive("orbital scheme requires a transitive action")
    orbit_id, count = pair_orbits(gen_arrays, n)
    sizes = np.bincount(orbit_id, minlength=count)
    # orbit 0 is the orbit of (0,0), i.e. the diagonal; keep it first
    rest = sorted(range(1, count), key=lambda o: (int(sizes[o]), o))
    relabel = np.empty(count, dtype=np.int64)
    relabel[0] = 0
    for new, old in enumerate(rest, start=1):
        relabel[old] = new
    matrix = relabel[orbit_id].reshape(n, n).astype(_class_dtype(count - 1))
    return AssociationScheme.from_matrix(matrix, source={"kind": "orbitals"})


def group_scheme(group: PermutationGroup,
                 relation_cap: int = DEFAULT_RELATION_CAP) -> AssociationScheme:
    """Scheme of a finite group: (x, y) lies in class i when y x^-1 sits in
    the i-th conjugacy class."""
    group.require_enumerated()
    n = group.order
    if n * n > relation_cap:
        raise CapExceeded(f"{n}^2 relation entries exceed the cap {relation_cap}")
    class_of = group.class_of_array()
    inv = group.inv_array()
    if n <= 4096:
        table = group.mul_table()
        matrix = class_of[table[:, inv]].T
    else:
        imgs = group._images()
        imgs64 = imgs.astype(np.int64)
        matrix = np.empty((n, n), dtype=np.int64)
        for x in range(n):
            # (e_y * e_x^-1).images = inv_images[e_y.images], all y at once
            composed = imgs[int(inv[x])][imgs64]
            matrix[x] = class_of[group._rows_to_indices(composed)]
    d = len(group.conjugacy_classes()) - 1
    matrix = matrix.astype(_class_dtype(d))
    return AssociationScheme.from_matrix(matrix, source={"kind": "group-scheme"})


# subgroups, cosets, double cosets


def is_subgroup(group: PermutationGroup, members) -> bool:
    group.require_enumerated()
    idx = sorted(set(int(m) for m in members))
    if not idx or idx[0] != 0:
        return False
    mem = set(idx)
    return all(group.mul_idx(a, b) in mem for a in idx for b in idx)


def stabilizer(group: PermutationGroup, point: int) -> list[int]:
    group.require_enumerated()
    return [i for i, e in enumerate(group.elements) if e.images[point] == point]


@dataclass
class DoubleCosetDecomposition:
    subgroup: tuple[int, ...]
    parts: list[list[int]]
    representatives: list[int]

    @property
    def sizes(self) -> list[int]:
        return [len(p) for p in self.parts]


def double_cosets(group: PermutationGroup, subgroup) -> DoubleCosetDecomposition:
    """Partition of the group into H g H parts, ordered by (size, min index);
    part 0 is H itself."""
    group.require_enumerated()
    H = sorted(set(int(h) for h in subgroup))
    if not is_subgroup(group, H):
        raise NotSubgroup("double cosets need a subgroup given by element indices")
    n = group.order
    seen = np.zeros(n, dtype=bool)
    parts = []
    for g in range(n):
        if seen[g]:
            continue
        Hg = {group.mul_idx(h, g) for h in H}
        part = {group.mul_idx(x, h) for x in Hg for h in H}
        members = sorted(part)
        seen[members] = True
        parts.append(members)
    parts.sort(key=lambda p: (len(p), p[0]))
    if parts[0] != H:
        raise NotSubgroup("double coset containing the identity is not H itself")
    return DoubleCosetDecomposition(tuple(H), parts, [p[0] for p in parts])


@dataclass
class CosetAction:
    """Right-coset permutation representation of G on H\\G... stored with the
    bookkeeping needed to evaluate permutation characters."""

    parent: PermutationGroup
    subgroup: tuple[int, ...]
    group: PermutationGroup          # generators acting on coset points
    coset_of: np.ndarray             # element index -> coset point
    point_reps: list[int]            # coset point -> minimal element index

    @property
    def n_points(self) -> int:
        return len(self.point_reps)

    def fixed_points(self, element_idx: int) -> int:
        g = int(element_idx)
        return sum(1 for p, r in enumerate(self.point_reps)
                   if int(self.coset_of[self.parent.mul_idx(r, g)]) == p)


def coset_action(group: PermutationGroup, subgroup) -> CosetAction:
    """Action of G on the right cosets Hx, points ordered by minimal element."""
    group.require_enumerated()
    H = sorted(set(int(h) for h in subgroup))
    if not is_subgroup(group, H):
        raise NotSubgroup("coset action needs a subgroup given by element indices")
    n = group.order
    coset_of = np.full(n, -1, dtype=np.int64)
    reps = []
    for x in range(n):
        if coset_of[x] >= 0:
            continue
        pid = len(reps)
        for h in H:
            coset_of[group.mul_idx(h, x)] = pid
        reps.append(x)
    images = []
    for g in group.generator_indices():
        images.append(Permutation(
            tuple(int(coset_of[group.mul_idx(r, g)]) for r in reps)))
    action = PermutationGroup(images)
    return CosetAction(group, tuple(H), action, coset_of, reps)


# constructors


def cyclic(n: int) -> PermutationGroup:
    if n < 1:
        raise ValueError("cyclic group needs n >= 1")
    if n == 1:
        return closure([Permutation.identity(1)])
    gen = Permutation(tuple((i + 1) % n for i in range(n)))
    return closure([gen])


def symmetric(n: int) -> PermutationGroup:
    if n < 2:
        return cyclic(1)
    cycle = Permutation(tuple((i + 1) % n for i in range(n)))
    swap = Permutation((1, 0) + tuple(range(2, n)))
    return closure([swap, cycle])


def regular_action(group: PermutationGroup) -> PermutationGroup:
    """Generators of G acting on G itself by right translation."""
    group.require_enumerated()
    n = group.order
    gens = [Permutation(tuple(group.mul_idx(x, g) for x in range(n)))
            for g in group.generator_indices()]
    return PermutationGroup(gens)


def _transvection_mats(spec):
    xs = [spec.pow(spec.generator, i) for i in range(spec.r)]
    mats = []
    for x in xs:
        mats.append((1, x, 0, 1))   # upper
    for x in xs:
        mats.append((1, 0, x, 1))   # lower
    return mats


def _projective_perm(spec, mat) -> Permutation:
    a, b, c, d = mat
    q = spec.q
    mul, add, div = spec._mul, spec._add, spec.div
    images = []
    for t in range(q):                     # the point [1 : t]
        u = add[a][mul[t][c]]
        v = add[b][mul[t][d]]
        images.append(q if u == 0 else div(v, u))
    images.append(q if c == 0 else div(d, c))   # the point [0 : 1]
    return Permutation(images)


def _vector_perm(spec, mat) -> Permutation:
    a, b, c, d = mat
    q = spec.q
    mul, add = spec._mul, spec._add
    images = []
    for code in range(q * q - 1):
        u, v = divmod(code + 1, q)
        nu = add[mul[u][a]][mul[v][c]]
        nv = add[mul[u][b]][mul[v][d]]
        images.append(nu * q + nv - 1)
    return Permutation(images)


def psl2(q: int, cap: int = DEFAULT_CLOSURE_CAP) -> PermutationGroup:
    """PSL(2, q) acting on the q+1 points of the projective line."""
    spec = field_for(q)
    gens = [_projective_perm(spec, m) for m in _transvection_mats(spec)]
    group = closure(gens, cap=cap)
    expected = q * (q * q - 1) // math.gcd(q - 1, 2)
    if group.order != expected:
        raise RuntimeError(
            f"PSL(2,{q}) closure produced {group.order} elements, expected {expected}")
    return group


def sl2(q: int, cap: int = DEFAULT_CLOSURE_CAP) -> PermutationGroup:
    """SL(2, q) acting on the q^2 - 1 nonzero vectors of its natural module."""
    spec = field_for(q)
    gens = [_vector_perm(spec, m) for m in _transvection_mats(spec)]
    group = closure(gens, cap=cap)
    expected = q * (q * q - 1)
    if group.order != expected:
        raise RuntimeError(
            f"SL(2,{q}) closure produced {group.order} elements, expected {expected}")
    return group
