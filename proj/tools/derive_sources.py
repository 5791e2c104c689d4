"""Derive the manufactured source terms hard-coded in src/manufactured.cpp.

Run with `python3 tools/derive_sources.py`; prints simplified expressions in
terms of x, y and tau = t - t_ref.
"""
import sympy as sp

x, y, tau = sp.symbols("x y tau", real=True)
pi = sp.pi


def grad(f, dim):
    return [sp.diff(f, x)] if dim == 1 else [sp.diff(f, x), sp.diff(f, y)]


def lap(f, dim):
    return sum(sp.diff(g, v) for g, v in zip(grad(f, dim), [x, y]))


def div(vec, dim):
    return sum(sp.diff(c, v) for c, v in zip(vec, [x, y][:dim]))


def mfg_sources(u, v, a1, a2, kappa, h, dim):
    gu = grad(u, dim)
    F = sp.diff(u, tau) + a1 * lap(u, dim) - sp.Rational(1, 2) * kappa * sum(g**2 for g in gu) - h * u
    G = sp.diff(v, tau) - lap(a2 * v, dim) - div([kappa * v * g for g in gu], dim)
    return sp.simplify(F), sp.simplify(G)


def linear_difference_sources(yy, zz, ur, vr, a1, a2, kappa, h):
    """Frozen-coefficient difference system, 1D."""
    dF = sp.diff(yy, tau) + a1 * sp.diff(yy, x, 2) - kappa * sp.diff(ur, x) * sp.diff(yy, x) - h * yy
    dG = (sp.diff(zz, tau) - a2 * sp.diff(zz, x, 2)
          - (2 * sp.diff(a2, x) + kappa * sp.diff(ur, x)) * sp.diff(zz, x)
          - (sp.diff(a2, x, 2) + kappa * sp.diff(ur, x, 2) + sp.diff(kappa, x) * sp.diff(ur, x)) * zz
          - kappa * vr * sp.diff(yy, x, 2) - sp.diff(kappa * vr, x) * sp.diff(yy, x))
    return sp.factor_terms(sp.expand(dF)), sp.factor_terms(sp.expand(dG))


u1 = sp.exp(tau) * sp.sin(pi * x)
v1 = sp.exp(-tau) * sp.cos(pi * x / 2)
cases = {
    "1d-linear": (u1, v1, 1, 1 + x / 2, 0, 1, 1),
    "1d-nonlinear": (u1, v1, 1, 1, 1, 1, 1),
    "1d-nonlinear-a2": (u1, v1, 1, 1 + x / 2, 1, 1, 1),
    "2d-smooth": (sp.exp(tau) * sp.sin(pi * x) * sp.sin(pi * y),
                  sp.exp(-tau) * sp.cos(pi * x / 2) * sp.cos(pi * y / 2), 1, 1, 1, 1, 2),
}
for name, (u, v, a1, a2, kappa, h, dim) in cases.items():
    F, G = mfg_sources(u, v, a1, a2, kappa, h, dim)
    print(name)
    print("  F =", sp.ccode(F))
    print("  G =", sp.ccode(G))

yy = sp.exp(tau) * sp.cos(pi * x)
zz = sp.exp(-tau) * (1 + x) * sp.sin(pi * x / 2)
dF, dG = linear_difference_sources(yy, zz, u1, v1, 1, 1 + x / 2, 1, 1)
print("reconstruction")
print("  dF =", sp.ccode(dF))
print("  dG =", sp.ccode(dG))
