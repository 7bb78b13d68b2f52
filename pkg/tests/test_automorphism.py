import random

import pytest
from hypothesis import given, strategies as st

from arboreal.automorphism import (ParityError, Portrait, PortraitError, ProbeDepthError,
                                   attracting_point, build_hyperbolic, busemann_shift, classify,
                                   fixes_boundary_point, random_portrait, rotation, transfer_boundary,
                                   transfer_vertex, translation_along)
from arboreal.local_action import dihedral_group, symmetric_group
from arboreal.tree import BoundaryPoint, Edge, ball, dist, sphere

S3 = symmetric_group(3)
D5 = dihedral_group(5)
XI = BoundaryPoint((), (1, 2))
GROUPS = {"S3": S3, "D5": D5}


def standard_gamma():
    return build_hyperbolic(S3, Edge((), 1), Edge((1, 2), 1))


def swap12():
    return rotation(3, (2, 1, 3))


def sample(F, seed, radius=2):
    return random_portrait(F, random.Random(seed), radius=radius)


# apply --------------------------------------------------------------------------------------

def test_identity_apply():
    assert Portrait.identity(3).apply((1, 2)) == (1, 2)


def test_root_rotation_swaps_leading_color():
    r = swap12()
    for v in ball(4, 3):
        if v and v[0] in (1, 2):
            assert r.apply(v)[0] == 3 - v[0]
    # a color the permutation fixes stays put along the tail ...
    assert r.apply((1, 3)) == (2, 3)
    # ... while the swapped colors are relabeled everywhere
    assert r.apply((1, 2)) == (2, 1)


def test_standard_gamma_moves_root():
    assert standard_gamma().apply(()) == (1, 2)


@pytest.mark.parametrize("name", ["S3", "D5"])
def test_apply_is_automorphism(name):
    F = GROUPS[name]
    for seed in range(10):
        g = sample(F, seed)
        verts = list(ball(3, F.degree))
        images = [g.apply(v) for v in verts]
        assert len(set(images)) == len(verts)
        for i, u in enumerate(verts):
            for j in range(i + 1, len(verts), 7):
                assert dist(images[i], images[j]) == dist(u, verts[j])
        for n in range(4):
            # spheres around g(x0) are images of spheres around x0
            assert all(dist(g.apply(v), g.root_image) == n for v in sphere(n, F.degree))


@pytest.mark.parametrize("name", ["S3", "D5"])
def test_ball_images_match_apply(name):
    g = sample(GROUPS[name], 3, radius=3)
    assert all(g.apply(v) == w for v, w in g.ball_images(4))


# group law -------------------------------------------------------------------------------------

def test_compose_with_identity():
    g = sample(S3, 11)
    e = Portrait.identity(3)
    assert g.compose(e).agrees_with(g, 5)
    assert e.compose(g) == g


def test_rotation_is_involution():
    r = swap12()
    assert r.inverse() == r


def test_gamma_times_inverse():
    gamma = standard_gamma()
    assert gamma.compose(gamma.inverse()).agrees_with(Portrait.identity(3), 6)


@pytest.mark.parametrize("name", ["S3", "D5"])
def test_group_axioms_exhaustive(name):
    F = GROUPS[name]
    rng = random.Random(2024)
    gs = [random_portrait(F, rng, radius=rng.randint(0, 3)) for _ in range(500)]
    ident = Portrait.identity(F.degree)
    for i in range(0, 500, 3):
        a, b, c = gs[i], gs[(i + 1) % 500], gs[(i + 2) % 500]
        # sparse portraits are canonical, so equality is equality of automorphisms
        assert a.compose(b).compose(c) == a.compose(b.compose(c))
        assert a.compose(ident) == a == ident.compose(a)
        assert a.compose(a.inverse()) == ident == a.inverse().compose(a)
    for a, b, c in zip(gs[:12], gs[12:24], gs[24:36]):
        left = a.compose(b).compose(c)
        right = a.compose(b.compose(c))
        assert left.agrees_with(right, 6)
        assert all(w == a.apply(b.apply(c.apply(v))) for v, w in left.ball_images(6))


@given(st.integers(0, 10 ** 6), st.sampled_from(["S3", "D5"]))
def test_compose_matches_pointwise(seed, name):
    F = GROUPS[name]
    g, h = sample(F, seed), sample(F, seed + 1)
    gh = g.compose(h)
    for v in ball(3, F.degree):
        assert gh.apply(v) == g.apply(h.apply(v))
        assert g.apply_inverse(g.apply(v)) == v
    assert gh.in_group(F) and g.inverse().in_group(F)
    assert gh.is_type_preserving()


def test_conjugates_stay_in_U_F():
    gamma = standard_gamma()
    for seed in range(20):
        k = sample(S3, seed)
        c = gamma.inverse().compose(k).compose(gamma)
        assert c.in_group(S3)


def test_support_radius_is_computed():
    g = Portrait(3, (), (1, 2, 3), {(1, 2): (3, 2, 1)})
    assert g.support_radius == 2
    h = g.compose(g.inverse())
    assert h.support_radius == 0


def test_power():
    gamma = standard_gamma()
    assert gamma.power(3).root_image == (1, 2, 1, 2, 1, 2)
    assert gamma.power(-2).compose(gamma.power(2)) == Portrait.identity(3)


# classification ---------------------------------------------------------------------------------

def test_classify_identity():
    c = classify(Portrait.identity(3), 2)
    assert c.kind == "elliptic" and c.translation_length == 0


def test_classify_root_rotation():
    c = classify(swap12(), 2)
    assert c.kind == "elliptic" and c.translation_length == 0
    assert swap12().fixes(())


def test_classify_standard_gamma():
    gamma = standard_gamma()
    for n in range(1, 6):
        assert dist((), gamma.power(n).apply(())) == 2 * n
    c = classify(gamma, 4)
    assert c.kind == "hyperbolic" and c.translation_length == 2
    assert c.axis_point == ()
    assert c.attracting == XI and c.repelling == BoundaryPoint((), (2, 1))


def test_classify_needs_probe_depth():
    with pytest.raises(ProbeDepthError, match="insufficient probe depth"):
        classify(standard_gamma(), 3)


@given(st.integers(0, 10 ** 6), st.sampled_from(["S3", "D5"]))
def test_classify_matches_brute_force(seed, name):
    F = GROUPS[name]
    g = sample(F, seed)
    D = len(g.root_image)
    c = classify(g, D + 2)
    probe = list(ball(D + 2, F.degree))
    displacement = {v: dist(v, g.apply(v)) for v in probe}
    assert c.translation_length == min(displacement.values())
    assert c.translation_length % 2 == 0
    assert displacement[c.axis_point] == c.translation_length
    # nearest displacement minimizer to x0
    assert len(c.axis_point) == min(len(v) for v, s in displacement.items() if s == c.translation_length)
    if c.is_hyperbolic:
        m = len(c.axis_point)
        for n in range(1, 5):
            assert dist((), g.power(n).apply(())) == n * c.translation_length + 2 * m
        assert g.boundary_image(c.attracting) == c.attracting
        assert g.boundary_image(c.repelling) == c.repelling
        assert c.attracting != c.repelling


def test_attracting_point_of_twisted_element():
    g = Portrait(3, (1, 2), (1, 3, 2), {(1,): (1, 3, 2)})
    c = classify(g, 4)
    assert c.is_hyperbolic
    far = g.power(6).apply(c.axis_point)
    assert c.attracting.word(len(far)) == far
    assert attracting_point(g) == c.attracting


# build_hyperbolic -------------------------------------------------------------------------------

def test_build_hyperbolic_length_two():
    gamma = build_hyperbolic(S3, Edge((), 1), Edge((1, 2), 1))
    assert gamma.apply(()) == (1, 2)
    assert classify(gamma, 4).translation_length == 2


def test_build_hyperbolic_length_four():
    gamma = build_hyperbolic(S3, Edge((), 1), Edge((1, 2, 1, 2), 1))
    assert classify(gamma, 6).translation_length == 4


def test_build_hyperbolic_parity():
    with pytest.raises(ParityError):
        build_hyperbolic(S3, Edge((), 1), Edge((1,), 2))


def test_build_hyperbolic_orientation():
    with pytest.raises(PortraitError):
        build_hyperbolic(S3, Edge((), 1), Edge((2, 1), 3))


@pytest.mark.parametrize("name", ["S3", "D5"])
def test_build_hyperbolic_maps_edges(name):
    F = GROUPS[name]
    d = F.degree
    for target in [w for w in sphere(2, d)] + [w for w in sphere(4, d)][:10]:
        for out in range(1, d + 1):
            if out == target[-1]:
                continue
            e, e2 = Edge((), target[0]), Edge(target, out)
            gamma = build_hyperbolic(F, e, e2)
            assert gamma.apply(()) == target and gamma.apply(e.child) == e2.child
            assert gamma.in_group(F)
            assert classify(gamma, len(target) + 2).translation_length == len(target)


# boundary action --------------------------------------------------------------------------------

def test_fixes_boundary_examples():
    assert fixes_boundary_point(Portrait.identity(3), XI, 4)
    assert fixes_boundary_point(standard_gamma(), XI, 4)
    assert not fixes_boundary_point(swap12(), BoundaryPoint((), (1, 3)), 4)


def test_fixes_boundary_needs_depth():
    g = Portrait(3, (), (1, 2, 3), {(1, 2): (3, 2, 1)})
    with pytest.raises(ProbeDepthError):
        fixes_boundary_point(g, XI, 3)


@given(st.integers(0, 10 ** 6), st.sampled_from(["S3", "D5"]),
       st.sampled_from(["|12", "3|12", "12|31", "|123"]))
def test_boundary_image_matches_ray_prefixes(seed, name, text):
    F = GROUPS[name]
    xi = BoundaryPoint.parse(text)
    g = sample(F, seed)
    eta = g.boundary_image(xi)
    M = 30
    img = g.apply(xi.word(M))
    n = M - len(g.root_image)
    assert eta.word(n) == img[:n]


def test_busemann_shift_of_gamma():
    gamma = standard_gamma()
    assert busemann_shift(gamma, XI) == 2
    assert busemann_shift(gamma.inverse(), XI) == -2


# transfers --------------------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["S3", "D5"])
def test_transfer_vertex(name):
    F = GROUPS[name]
    base = XI.word(3)
    reached = set()
    for u in sphere(3, F.degree):
        try:
            k = transfer_vertex(F, base, u)
        except PortraitError:
            continue
        assert not k.root_image and k.in_group(F)
        assert k.apply(base) == u
        reached.add(u)
    # every vertex reachable by a random element of K is reached by a transfer
    rng = random.Random(5)
    for _ in range(40):
        k = random_portrait(F, rng, radius=3, in_K=True)
        assert k.apply(base) in reached


def test_transfer_boundary_d5():
    k = transfer_boundary(D5, XI, BoundaryPoint.parse("|15"))
    assert k.boundary_image(XI) == BoundaryPoint.parse("|15")
    assert not k.root_image


def test_translation_along_shifted_end():
    xi = BoundaryPoint.parse("3|12")
    t = translation_along(S3, xi, 2)
    assert t.apply(()) == (3, 1)
    assert t.boundary_image(xi) == xi
    assert busemann_shift(t, xi) == 2


# serialization --------------------------------------------------------------------------------

@given(st.integers(0, 10 ** 6), st.sampled_from(["S3", "D5"]))
def test_json_roundtrip(seed, name):
    g = sample(GROUPS[name], seed, radius=2)
    assert Portrait.from_json(g.to_json()) == g


def test_from_local_rejects_inconsistent_entry():
    with pytest.raises(PortraitError):
        Portrait.from_local(3, (), {(): (1, 2, 3), (1,): (2, 1, 3)})


def test_from_dict_radius_check():
    data = {"degree": 3, "root_image": "", "entries": [["", "1 2 3"], ["12", "3 2 1"]], "radius": 1}
    with pytest.raises(PortraitError):
        Portrait.from_dict(data)
