import random

import pytest
from hypothesis import HealthCheck, settings

from arboreal.automorphism import Portrait, random_portrait
from arboreal.local_action import LocalGroup, dihedral_group, symmetric_group
from arboreal.parabolic import ParabolicSpec, minimal_hyperbolic
from arboreal.tree import BoundaryPoint

settings.register_profile("arboreal", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("arboreal")

XI = BoundaryPoint((), (1, 2))


@pytest.fixture(scope="session")
def S3():
    return symmetric_group(3)


@pytest.fixture(scope="session")
def D5():
    return dihedral_group(5)


@pytest.fixture(scope="session")
def C3():
    return LocalGroup.from_strings(3, ["(1 2 3)"])


@pytest.fixture(scope="session")
def xi():
    return XI


@pytest.fixture(scope="session", params=["S3", "D5"])
def config(request):
    """(F, depth) pairs used by the exhaustive experiments."""
    if request.param == "S3":
        return symmetric_group(3), 4
    return dihedral_group(5), 3


@pytest.fixture(scope="session")
def full_S3(S3):
    return ParabolicSpec(S3, XI)


@pytest.fixture(scope="session")
def full_D5(D5):
    return ParabolicSpec(D5, XI)


@pytest.fixture(scope="session")
def gamma_S3(full_S3):
    return minimal_hyperbolic(full_S3)


@pytest.fixture(scope="session")
def gamma_D5(full_D5):
    return minimal_hyperbolic(full_D5)


def root_rotation(d, perm):
    return Portrait(d, (), perm)


def portraits(F, seed, count, radius=2, in_K=False):
    rng = random.Random(seed)
    return [random_portrait(F, rng, radius=radius, in_K=in_K) for _ in range(count)]


def random_ray_fixer(F, xi, R, rng):
    """Random element of K fixing the ray [x0, xi), varying up to radius R.

    Built directly from local permutations so that it does not depend on the
    transfer routines under test.
    """
    from arboreal.local_action import mul
    from arboreal.tree import sphere
    d = F.degree
    stabs = {c: [p for p in F.elements if p[c - 1] == c] for c in range(1, d + 1)}
    period = len(xi.period)
    root = rng.choice([p for p in F.elements if p[xi.letter(0) - 1] == xi.letter(0)])
    sigma = {(): root}
    rel = {}
    for r in range(1, R + 1):
        for v in sphere(r, d):
            choices = stabs[v[-1]]
            if v == xi.word(r):
                keep = range(r, r + 1) if r < R else range(r, r + period + len(xi.prefix) + 1)
                choices = [t for t in choices
                           if all(mul(sigma[v[:-1]], t)[xi.letter(j) - 1] == xi.letter(j) for j in keep)]
            tau = rng.choice(choices)
            rel[v] = tau
            if v == xi.word(r):
                sigma[v] = mul(sigma[v[:-1]], tau)
    return Portrait(d, (), root, rel)
