"""Exact multiparameter persistence modules over F_p.

Modules and certificates are plain dicts in the JSON interchange format used
by the command line tool; rationals are fractions.Fraction or "num/den" strings.
"""

import json
import os
import sys
from fractions import Fraction

if os.environ.get("PERSMOD_EXTENSION_DIR"):
    sys.path.insert(0, os.environ["PERSMOD_EXTENSION_DIR"])
    import _persmod as _ext
else:
    from . import _persmod as _ext

PreconditionError = _ext.PreconditionError
MalformedInput = _ext.MalformedInput
VerificationError = _ext.VerificationError


def _q(x):
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def _enc(obj):
    return json.dumps(obj)


def _dec(text):
    return json.loads(text)


def module_G(p=65521):
    return _dec(_ext.module_G(p))


def interval_module(lo, hi, p=65521):
    return _dec(_ext.interval_module([_q(x) for x in lo], [_q(x) for x in hi], p))


def random_module(n, size, max_dim, seed=0, p=65521):
    return _dec(_ext.random_module(n, size, max_dim, seed, p))


def direct_sum(A, B):
    """A + B on the union of their grids."""
    return _dec(_ext.direct_sum(_enc(A), _enc(B)))


def validate(M):
    ok, _ = _ext.validate(_enc(M))
    return ok


def hom_dim(M, N):
    return _ext.hom_dim(_enc(M), _enc(N))


def is_indecomposable(M):
    return _ext.is_indecomposable(_enc(M))


def is_isomorphic(M, N, seed=0):
    return _ext.is_isomorphic(_enc(M), _enc(N), seed)


def decompose(M, seed=0):
    return [_dec(s) for s in _ext.decompose(_enc(M), seed)]


def verify_certificate(cert):
    ok, _ = _ext.verify_certificate(_enc(cert))
    return ok


def rank_lower_bound(M, N):
    return Fraction(_ext.rank_lower_bound(_enc(M), _enc(N)))


def tack(A, B, delta):
    m, c = _ext.tack(_enc(A), _enc(B), _q(delta))
    return _dec(m), _dec(c)


def approximate_indecomposable(N, eps, seed=0):
    m, c = _ext.approximate_indecomposable(_enc(N), _q(eps), seed)
    return _dec(m), _dec(c)


def is_eps_indecomposable(M, eps, seed=0):
    return _ext.is_eps_indecomposable(_enc(M), _q(eps), seed)


def bottleneck_upper_bound(M, N, eps, seed=0):
    matched, c = _ext.bottleneck_upper_bound(_enc(M), _enc(N), _q(eps), seed)
    return matched, (_dec(c) if c is not None else None)


def instability_demo(M, delta, seed=0):
    r = _ext.instability_demo(_enc(M), _q(delta), seed)
    return {
        "N": _dec(r["N"]),
        "certificate": _dec(r["certificate"]),
        "bottleneck_lower": Fraction(r["bottleneck_lower"]),
        "gap": Fraction(r["gap"]),
    }


def rational(x):
    """Fraction from a "num/den" string as found in module and certificate dicts."""
    return Fraction(x)
