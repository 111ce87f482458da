import numpy as np
import pytest

from schemeforge.errors import ParseError
from schemeforge.loopcore import (InnerOrbitReport, TableLoop,
                                  associativity_counterexample, inner_orbits,
                                  loop_from_group, loop_scheme,
                                  moufang_check,
                                  multiplication_group_generators,
                                  parse_loop_table, quasigroup_check)
from schemeforge.permgroup import closure, cyclic, group_scheme, symmetric

# smallest loop that is not a group; fails the Moufang identities
LOOP5 = [
    [0, 1, 2, 3, 4],
    [1, 0, 3, 4, 2],
    [2, 3, 4, 0, 1],
    [3, 4, 1, 2, 0],
    [4, 2, 0, 1, 3],
]


def test_group_table_is_a_loop():
    loop = loop_from_group(symmetric(3))
    report = quasigroup_check(loop)
    assert report.passed and report.cell is None
    assert bool(report)


def test_quasigroup_check_accepts_raw_table():
    assert quasigroup_check(np.array(LOOP5)).passed


def test_quasigroup_check_row_duplicate():
    report = quasigroup_check(np.array([[0, 1], [1, 1]]))
    assert not report.passed
    assert report.cell == (1, 1)
    assert "row" in report.failure


def test_quasigroup_check_column_duplicate():
    table = [[0, 1, 2], [1, 2, 0], [2, 1, 0]]  # rows fine at (2,1)? col 1 repeats
    report = quasigroup_check(np.array(table))
    assert not report.passed
    assert report.failure is not None


def test_quasigroup_check_missing_identity():
    report = quasigroup_check(np.array([[1, 0], [0, 1]]))
    assert not report.passed
    assert "identity" in report.failure


def test_quasigroup_check_out_of_range():
    report = quasigroup_check(np.array([[0, 5], [1, 0]]))
    assert not report.passed
    assert report.cell == (0, 1)


def test_parse_loop_table_roundtrip():
    text = "# order five loop\n5\n" + "\n".join(" ".join(str(v) for v in row)
                                                for row in LOOP5)
    table = parse_loop_table(text)
    assert np.array_equal(table, np.array(LOOP5))


def test_parse_loop_table_rejects_bad_token():
    with pytest.raises(ParseError):
        parse_loop_table("2\n0 x\n1 0\n")


def test_parse_loop_table_rejects_non_loop():
    with pytest.raises(ParseError) as err:
        parse_loop_table("2\n1 0\n0 1\n")
    assert "not a loop table" in str(err.value)


def test_moufang_fails_for_order5_loop():
    loop = TableLoop(np.array(LOOP5))
    report = moufang_check(loop, exhaustive=True)
    assert not report.passed
    assert report.mode == "exhaustive"
    text, x, y, z = report.counterexample
    assert (text, x, y, z) == ("((x*y)*x)*z = x*(y*(x*z))", 1, 0, 2)
    # replay the witness on the table
    T = np.array(LOOP5)
    lhs = T[T[T[x, y], x], z]
    rhs = T[x, T[y, T[x, z]]]
    assert lhs != rhs


def test_moufang_holds_for_groups():
    for group in (symmetric(3), cyclic(7)):
        report = moufang_check(loop_from_group(group), exhaustive=True)
        assert report.passed
        assert report.triples_checked == group.order ** 3


def test_moufang_holds_for_paige_loop_exhaustive(paige2):
    report = moufang_check(paige2, exhaustive=True)
    assert report.passed and report.mode == "exhaustive"


def test_moufang_sampled_mode(paige3):
    report = moufang_check(paige3, samples=20_000, exhaustive=False)
    assert report.passed and report.mode == "sampled"
    assert report.triples_checked == 20_000


def test_associativity_counterexample_for_paige_loops(paige2, paige3):
    for loop in (paige2, paige3):
        witness = associativity_counterexample(loop)
        assert witness is not None
        x, y, z = witness
        assert loop.mul(loop.mul(x, y), z) != loop.mul(x, loop.mul(y, z))


def test_associativity_counterexample_none_for_groups():
    loop = loop_from_group(symmetric(3))
    assert associativity_counterexample(loop) is None


def test_multiplication_group_generators(paige2):
    gens = multiplication_group_generators(paige2)
    assert len(gens) == 2 * paige2.n
    # L(0) and R(0) are the identity
    assert gens[0].is_identity
    assert gens[paige2.n].is_identity
    arr = np.array([g.images for g in gens])
    assert all(np.array_equal(np.sort(row), np.arange(paige2.n)) for row in arr)


@pytest.mark.parametrize("make", [lambda: symmetric(3), lambda: cyclic(4),
                                  lambda: cyclic(5)])
def test_loop_scheme_of_group_equals_group_scheme(make):
    group = make()
    loop = loop_from_group(group)
    got = loop_scheme(loop, inner_orbits(loop, policy="exact"))
    want = group_scheme(group)
    assert got.n == want.n and got.d == want.d
    assert np.array_equal(got.dense_matrix(), want.dense_matrix())


def test_inner_orbit_report_shape(paige2):
    report = inner_orbits(paige2, policy="exact")
    assert isinstance(report, InnerOrbitReport)
    assert report.class_of.shape == (120,)
    assert report.class_of[0] == 0
    assert report.n_classes == 3
    sizes = np.bincount(report.class_of)
    assert sizes.tolist() == [1, 56, 63]


def test_exact_and_randomized_orbits_agree(paige2):
    exact = inner_orbits(paige2, policy="exact")
    randomized = inner_orbits(paige2, policy="randomized", seed=7)
    assert np.array_equal(exact.class_of, randomized.class_of)


def test_randomized_orbits_seed_stable(paige3):
    a = inner_orbits(paige3, policy="randomized", seed=1)
    b = inner_orbits(paige3, policy="randomized", seed=2)
    assert np.array_equal(a.class_of, b.class_of)


def test_scheme_invariant_under_translations(mstar2_scheme, paige2):
    # rel(u, v) = rel(xu, xv) = rel(ux, vx): the partition comes from the
    # inner mapping group, so all translations preserve it
    mat = mstar2_scheme.dense_matrix()
    rng = np.random.default_rng(99)
    X = rng.integers(0, 120, 10_000)
    U = rng.integers(0, 120, 10_000)
    V = rng.integers(0, 120, 10_000)
    left = mat[paige2.mul_vec(X, U), paige2.mul_vec(X, V)]
    right = mat[paige2.mul_vec(U, X), paige2.mul_vec(V, X)]
    base = mat[U, V]
    assert np.array_equal(base, left)
    assert np.array_equal(base, right)


def test_loop_scheme_valencies(mstar2_scheme):
    assert mstar2_scheme.n == 120
    assert mstar2_scheme.valencies.tolist() == [1, 56, 63]
    assert mstar2_scheme.transpose_map.tolist() == [0, 1, 2]


def test_loop_scheme_accepts_class_array(paige2):
    report = inner_orbits(paige2, policy="exact")
    direct = loop_scheme(paige2, report.class_of)
    via_report = loop_scheme(paige2, report)
    assert np.array_equal(direct.dense_matrix(), via_report.dense_matrix())
