"""Independent rational-function oracle built on sympy.

Monomials and factored scalars are turned into sympy expressions so that
identities can be checked as exact equalities of rational functions,
without going through the package's own expansion code.
"""
import sympy as sp

q, z1, z2 = sp.symbols("q z1 z2")
_cache = {}


def _symbol(name, shift):
    key = (name, shift)
    if key not in _cache:
        tag = "" if shift is None else f"_{shift}"
        _cache[key] = sp.Symbol(f"{name.strip('_')}{tag}")
    return _cache[key]


def mono_expr(m):
    if m.is_zero:
        return sp.Integer(0)
    e = q ** m.q * z1 ** m.z1 * z2 ** m.z2
    for (name, shift), k in m.sym:
        e *= _symbol(name, shift) ** k
    return e


def fr_expr(x):
    if x.is_zero:
        return sp.Integer(0)
    e = sp.Integer(x.coeff) * mono_expr(x.prefactor)
    for m, k in x.linear:
        e *= (1 - mono_expr(m)) ** k
    if x.overflow is not None:
        e *= sum(c * mono_expr(m) for m, c in x.overflow)
    if x.inf:
        raise ValueError("infinite products have no finite sympy form")
    return e


def series_expr(f):
    return sum((c * q ** a * z1 ** b * z2 ** d for (a, b, d), c in f.items()), sp.Integer(0))


def is_zero(expr):
    return sp.simplify(sp.together(expr)) == 0
