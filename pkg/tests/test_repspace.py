"""Representation spaces over F_q: points, orbits, hearts, extensions."""

import pytest

from hallcontract.cache import OrbitCache
from hallcontract.ffalg import EnumerationBoundError, Field, Mat, gl_order
from hallcontract.quiver import contract_quiver, identity_automorphism, make_orbit_pair
from hallcontract.repspace import (
    RepSpace,
    UnsupportedAutomorphismError,
    act,
    contract_point,
    direct_sum_point,
    enumerate_group,
    enumerate_points,
    extension_count,
    extensions_over,
    fiber_of_contraction,
    group_generators,
    group_identity,
    group_order,
    is_heart,
    is_stable,
    orbits,
    quotient_point,
    stable_subspaces,
    sub_point,
    sub_dims_of,
)
from hallcontract.ffalg import Subspace
from hallcontract.cartan import realize_graph

from conftest import double_orbit_datum, jordan_quiver, kronecker_quiver


def jordan_space(n, q=2):
    return RepSpace(jordan_quiver(), Field(q), {"1": n})


def kron_space(dims, q=2):
    quiver = kronecker_quiver()
    return RepSpace(quiver, Field(q), {"p": dims[0], "m": dims[1]})


def kron_contraction():
    quiver = kronecker_quiver()
    autom = identity_automorphism(quiver)
    pair = make_orbit_pair(quiver, autom, "p", "m", "e")
    return contract_quiver(quiver, autom, pair)


def test_point_counts():
    assert jordan_space(1).total_points == 2
    assert jordan_space(2).total_points == 16
    assert kron_space((1, 1)).total_points == 4
    assert jordan_space(0).total_points == 1


def test_rank_is_a_point_bijection():
    space = jordan_space(2)
    seen = set()
    for x in enumerate_points(space):
        r = space.point_rank(x)
        assert space.point_from_rank(r) == x
        seen.add(r)
    assert seen == set(range(space.total_points))
    assert space.point_rank(space.zero_point()) == 0


def test_action_satisfies_group_laws():
    space = jordan_space(2)
    e = group_identity(space)
    group = enumerate_group(space)
    assert len(group) == group_order(space) == 6
    x = space.point_from_rank(7)
    assert act(space, e, x) == x
    for g in group[:3]:
        for h in group[3:]:
            gh = tuple(a @ b for a, b in zip(g, h))
            assert act(space, gh, x) == act(space, g, act(space, h, x))


def test_conjugation_example():
    space = jordan_space(2)
    f = space.field
    swap = (Mat(f, ((0, 1), (1, 0))),)
    x = (Mat(f, ((0, 1), (0, 0))),)
    assert act(space, swap, x) == (Mat(f, ((0, 0), (1, 0))),)


def test_scalar_action_over_f3():
    space = kron_space((1, 1), q=3)
    f = space.field
    g = (Mat(f, ((1,),)), Mat(f, ((2,),)))
    x = (Mat(f, ((1,),)), Mat(f, ((0,),)))
    # (g.x)_h = g_m x_h g_p^{-1} doubles each entry here
    assert act(space, g, x) == (Mat(f, ((2,),)), Mat(f, ((0,),)))


def test_jordan_orbit_table():
    table = orbits(jordan_space(2))
    assert table.count == 6
    assert table.sizes == [1, 6, 3, 3, 2, 1]
    assert sum(table.sizes) == 16
    # ordinal 2 is the nilpotent class, entered at [[0,0],[1,0]]
    f = Field(2)
    assert table.representative(2) == (Mat(f, ((0, 0), (1, 0))),)
    assert table.representative(0) == (jordan_space(2).zero_point())
    assert table.orbit_id(2) == "o2"
    assert table.ordinal_of_id("o2") == 2
    with pytest.raises(KeyError):
        table.ordinal_of_id("o9")
    with pytest.raises(KeyError):
        table.ordinal_of_id("x1")


def test_kronecker_orbits_over_f3():
    table = orbits(kron_space((1, 1), q=3))
    assert table.count == 5
    assert sorted(table.sizes) == [1, 2, 2, 2, 2]


def test_zero_dimension_space_has_one_orbit():
    table = orbits(jordan_space(0))
    assert table.count == 1
    assert table.sizes == [1]


def test_orbit_sizes_divide_group_order():
    for space in (jordan_space(2), kron_space((2, 1)), kron_space((1, 1), q=3)):
        table = orbits(space)
        order = group_order(space)
        assert all(order % s == 0 for s in table.sizes)


def test_sweep_and_closure_agree():
    for space in (jordan_space(2), kron_space((1, 1), q=3), kron_space((2, 2))):
        a = orbits(space, method="sweep")
        b = orbits(space, method="closure")
        assert a.index == b.index
        assert a.sizes == b.sizes
        assert a.rep_ranks == b.rep_ranks


def test_representatives_are_rank_least():
    table = orbits(jordan_space(2))
    for k in range(table.count):
        ranks = [table.space.point_rank(x) for x in table.points_of(k)]
        assert table.rep_ranks[k] == min(ranks)
        assert len(ranks) == table.sizes[k]


def test_orbit_cache_roundtrip(tmp_path):
    space = jordan_space(2)
    cache = OrbitCache(str(tmp_path))
    first = orbits(space, cache=cache)
    assert len(cache.entries()) == 1
    again = orbits(space, cache=OrbitCache(str(tmp_path)))
    assert again.index == first.index and again.sizes == first.sizes

    # the load path is exercised for real: a doctored entry is returned as is
    doctored = first.to_payload()
    doctored["sizes"] = list(reversed(first.sizes))
    cache.store(space.cache_key(), doctored)
    assert orbits(space, cache=cache).sizes == list(reversed(first.sizes))

    # corrupt entries fall back to recomputation
    path = cache._path(space.cache_key())
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("{ not json")
    assert orbits(space, cache=cache).sizes == first.sizes
    assert cache.purge() >= 1
    assert cache.entries() == []


def test_nontrivial_automorphism_is_refused():
    quiver, autom = realize_graph(double_orbit_datum())
    dims = {v: 1 for v in quiver.vertices}
    with pytest.raises(UnsupportedAutomorphismError):
        RepSpace(quiver, Field(2), dims, autom=autom)
    # the identity is fine when passed explicitly
    RepSpace(kronecker_quiver(), Field(2), {"p": 1, "m": 1},
             autom=identity_automorphism(kronecker_quiver()))


def test_enumeration_bounds():
    with pytest.raises(EnumerationBoundError):
        list(enumerate_points(jordan_space(2), max_points=8))
    with pytest.raises(EnumerationBoundError):
        orbits(jordan_space(3), max_points=100)
    with pytest.raises(EnumerationBoundError):
        enumerate_group(kron_space((2, 2), q=3), max_count=10)


def test_heart_membership():
    space = kron_space((1, 1))
    con = kron_contraction()
    f = space.field
    hearts = [x for x in enumerate_points(space) if is_heart(space, con, x)]
    assert hearts == [
        (Mat(f, ((1,),)), Mat(f, ((0,),))),
        (Mat(f, ((1,),)), Mat(f, ((1,),))),
    ]


def test_heart_is_group_stable():
    space = kron_space((2, 2))
    con = kron_contraction()
    gens = group_generators(space)
    for x in enumerate_points(space):
        if not is_heart(space, con, x):
            continue
        for g in gens:
            assert is_heart(space, con, act(space, g, x))


def test_contract_point_values():
    space = kron_space((1, 1))
    con = kron_contraction()
    f = space.field
    hat = RepSpace(con.quiver, f, {"p": 1})
    x10 = (Mat(f, ((1,),)), Mat(f, ((0,),)))
    x11 = (Mat(f, ((1,),)), Mat(f, ((1,),)))
    assert contract_point(space, con, x10, hat) == (Mat(f, ((0,),)),)
    assert contract_point(space, con, x11, hat) == (Mat(f, ((1,),)),)
    with pytest.raises(ValueError):
        contract_point(space, con, space.zero_point(), hat)

    f3 = Field(3)
    space3 = kron_space((1, 1), q=3)
    hat3 = RepSpace(con.quiver, f3, {"p": 1})
    x = (Mat(f3, ((2,),)), Mat(f3, ((1,),)))
    # the pre composite reads x_e^{-1} x_f = 2^{-1} = 2
    assert contract_point(space3, con, x, hat3) == (Mat(f3, ((2,),)),)

    big = kron_space((2, 2))
    bighat = RepSpace(con.quiver, f, {"p": 2})
    xe = Mat.identity(f, 2)
    xf = Mat(f, ((0, 1), (0, 0)))
    assert contract_point(big, con, (xe, xf), bighat) == (xf,)


def test_contract_point_is_equivariant_in_the_kept_part():
    space = kron_space((2, 2))
    con = kron_contraction()
    f = space.field
    hat = RepSpace(con.quiver, f, {"p": 2})
    xs = [x for x in enumerate_points(space) if is_heart(space, con, x)][:5]
    gs = enumerate_group(space)[::7]
    for x in xs:
        xhat = contract_point(space, con, x, hat)
        for g in gs:
            lhs = contract_point(space, con, act(space, g, x), hat)
            rhs = act(hat, (g[0],), xhat)
            assert lhs == rhs


def test_fibers_have_gl_size():
    con = kron_contraction()
    for q, dims, expected in ((2, (1, 1), 1), (3, (1, 1), 2), (2, (2, 2), 6)):
        space = kron_space(dims, q=q)
        hat = RepSpace(con.quiver, space.field, {"p": dims[0]})
        xhat = hat.zero_point()
        fiber = list(fiber_of_contraction(space, con, xhat, hat))
        assert len(fiber) == expected == gl_order(dims[0], q)
        for y in fiber:
            assert contract_point(space, con, y, hat) == xhat


def test_stable_line_counts():
    space = jordan_space(2)
    f = space.field
    nilpotent = (Mat(f, ((0, 0), (1, 0))),)
    assert len(stable_subspaces(space, nilpotent, {"1": 1})) == 1
    assert len(stable_subspaces(space, space.zero_point(), {"1": 1})) == 3
    identity = (Mat.identity(f, 2),)
    assert len(stable_subspaces(space, identity, {"1": 1})) == 3
    for U in stable_subspaces(space, nilpotent, {"1": 1}):
        assert is_stable(space, nilpotent, U)
        assert sub_dims_of(U) == {"1": 1}


def test_extensions_recover_sub_and_quotient():
    space = jordan_space(1)
    big = jordan_space(2)
    f = space.field
    xt = (Mat(f, ((1,),)),)
    xw = (Mat(f, ((0,),)),)
    ys = list(extensions_over(space, space, xt, xw, big))
    assert len(ys) == extension_count(space, space) == 2
    U = {"1": Subspace.spanned_by(f, 2, [(0, 1)])}
    for y in ys:
        assert is_stable(big, y, U)
        assert sub_point(big, y, U) == xw
        assert quotient_point(big, y, U) == xt
    assert direct_sum_point(space, space, xt, xw) in ys


def test_extension_counts():
    jo = RepSpace(jordan_quiver(), Field(2), {"1": 1})
    assert extension_count(jo, jo) == 2
    k = kron_space((1, 1))
    assert extension_count(k, k) == 4
    assert len(list(extensions_over(k, k, k.zero_point(), k.zero_point()))) == 4
    with pytest.raises(EnumerationBoundError):
        list(extensions_over(kron_space((3, 3)), kron_space((3, 3)),
                             kron_space((3, 3)).zero_point(),
                             kron_space((3, 3)).zero_point(), max_count=10))


def test_extension_is_heart_iff_both_factors_are():
    space = kron_space((1, 1))
    big = kron_space((2, 2))
    con = kron_contraction()
    for xt in enumerate_points(space):
        for xw in enumerate_points(space):
            both = is_heart(space, con, xt) and is_heart(space, con, xw)
            for y in extensions_over(space, space, xt, xw, big):
                assert is_heart(big, con, y) == both
