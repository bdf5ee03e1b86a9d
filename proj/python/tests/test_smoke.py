from fractions import Fraction

import pytest

import persmod as pm


def square(a, b):
    return pm.interval_module([a, a], [b, b])


def test_gadget():
    G = pm.module_G()
    assert pm.validate(G)
    assert pm.hom_dim(G, G) == 1
    assert pm.hom_dim(pm.module_G(2), pm.module_G(2)) == 1
    assert pm.is_indecomposable(G)


def test_decompose_random():
    M = pm.random_module(2, 3, 2, seed=3)
    parts = pm.decompose(M)
    assert all(pm.is_indecomposable(x) for x in parts)
    assert sum(sum(x["dims"]) for x in parts) == sum(M["dims"])


def test_tack():
    A, B = square(0, 2), square(5, 6)
    M, cert = pm.tack(A, B, Fraction(1, 2))
    assert pm.is_indecomposable(M)
    assert pm.verify_certificate(cert)
    assert pm.rational(cert["eps"]) < Fraction(1, 2)


def test_approximation_and_matching():
    N = pm.random_module(2, 3, 2, seed=1)
    M, cert = pm.approximate_indecomposable(N, "1/2")
    assert pm.verify_certificate(cert)
    assert pm.is_eps_indecomposable(M, "1/100")
    assert pm.rank_lower_bound(N, M) <= pm.rational(cert["eps"])
    matched, c = pm.bottleneck_upper_bound(N, N, 0)
    assert matched and pm.verify_certificate(c)


def test_instability():
    A, B = square(0, 2), square(10, 12)
    r = pm.instability_demo(pm.direct_sum(A, B), Fraction(1, 10))
    assert r["gap"] >= 9
    assert pm.verify_certificate(r["certificate"])


def test_errors():
    with pytest.raises(pm.MalformedInput):
        pm.validate({"p": 7})
    with pytest.raises(pm.PreconditionError):
        pm.instability_demo(square(0, 2), Fraction(1, 10))
