"""Parametric monads, comonads and bimonads on T over affine manifolds.

For rationals a, b and coordinates (x, v, w, d) on T^2:

    mu^a(x, v, w, d)     = (x, v + w + a d)
    eta(x)               = (x, 0)
    delta^b(x, v)        = (x, v, v, b v)
    eps(x, v)            = x
    lam^{a,b}(x, v, w, d) = (x, w, v + w + a d, b w - d)

All of these are rational linear maps, so every law is checked exactly on the
affine basis (origin plus unit vectors); agreement there forces agreement
everywhere.

Whiskering: F_T is F built at dimension 2n, and T(F) is its tangent lift.
Diagrams, in diagrammatic order (f;g = f then g):

monad
    eta_T;mu = 1,  T(eta);mu = 1,  T(mu);mu = mu_T;mu
comonad
    delta;eps_T = 1,  delta;T(eps) = 1,  delta;T(delta) = delta;delta_T
mixed distributive law lam: TT -> TT
    unit            eta_T;lam = T(eta)
    counit          lam;eps_T = T(eps)
    multiplication  mu_T;lam = T(lam);lam_T;T(mu)
    comultiplication lam;delta_T = T(delta);lam_T;T(lam)
bimonad compatibilities (see :func:`verify_bimonad_compatibility`)
    mu;delta = T(delta);lam_T;T(mu),  mu;eps = T(eps);eps,
    eta;delta = eta;T(eta),  eta;eps = 1
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .dsl import LinearMap, compose, identity, tangent_lift
from .laws import LawReport, affine_basis, check_equation
from .structure import block_map, p, zero

T = tangent_lift


def as_rational(value) -> Fraction:
    """Fraction from an int, Fraction or string such as '5/3' or '-0.25'."""
    return value if isinstance(value, Fraction) else Fraction(str(value))


def monad_mu(a, n: int) -> LinearMap:
    a = as_rational(a)
    return block_map(n, 4, [[0], [1, 2, (3, a)]], name=f"mu^{a}")


def comonad_delta(b, n: int) -> LinearMap:
    b = as_rational(b)
    return block_map(n, 2, [[0], [1], [1], [(1, b)]], name=f"delta^{b}")


def distributive_lambda(a, b, n: int) -> LinearMap:
    a, b = as_rational(a), as_rational(b)
    return block_map(n, 4, [[0], [2], [1, 2, (3, a)], [(2, b), (3, -1)]], name=f"lambda^{a},{b}")


@dataclass
class BimonadInstance:
    """The five maps at dimension n.

    Whiskered copies (F_T) are rebuilt from ``a`` and ``b`` at dimension 2n,
    so replacing a map here (say with a corrupted one) changes only its
    unwhiskered occurrences.
    """

    a: Fraction
    b: Fraction
    n: int
    mu: LinearMap
    eta: LinearMap
    delta: LinearMap
    eps: LinearMap
    lam: LinearMap

    def whiskered(self) -> BimonadInstance:
        return build_instance(self.a, self.b, 2 * self.n)

    def replace(self, **maps) -> BimonadInstance:
        return replace(self, **maps)


def build_instance(a, b, n: int) -> BimonadInstance:
    a, b = as_rational(a), as_rational(b)
    return BimonadInstance(a, b, n, monad_mu(a, n), zero(n), comonad_delta(b, n), p(n), distributive_lambda(a, b, n))


def _exact(name, lhs, rhs) -> LawReport:
    pts = affine_basis(lhs.in_dim)
    return check_equation(name, lhs, rhs, lhs.in_dim, sampler=None, samples=0, tol=0.0, exact=True, points=pts)


def _float(name, lhs, rhs, samples=20, seed=0) -> LawReport:
    from .laws import Sampler

    return check_equation(name, lhs, rhs, lhs.in_dim, sampler=Sampler.for_check(seed, name), samples=samples, tol=1e-12)


def _law(exact: bool):
    return _exact if exact else _float


def _details(inst: BimonadInstance) -> dict:
    return {"a": str(inst.a), "b": str(inst.b), "n": inst.n}


def verify_monad_laws(inst: BimonadInstance, exact: bool = True) -> LawReport:
    W = inst.whiskered()
    law = _law(exact)
    two = identity(2 * inst.n)
    return LawReport.suite("monad", [
        law("monad.left_unit", compose(W.eta, inst.mu), two),
        law("monad.right_unit", compose(T(inst.eta), inst.mu), two),
        law("monad.assoc", compose(T(inst.mu), inst.mu), compose(W.mu, inst.mu)),
    ], details=_details(inst))


def verify_comonad_laws(inst: BimonadInstance, exact: bool = True) -> LawReport:
    W = inst.whiskered()
    law = _law(exact)
    two = identity(2 * inst.n)
    return LawReport.suite("comonad", [
        law("comonad.left_counit", compose(inst.delta, W.eps), two),
        law("comonad.right_counit", compose(inst.delta, T(inst.eps)), two),
        law("comonad.coassoc", compose(inst.delta, T(inst.delta)), compose(inst.delta, W.delta)),
    ], details=_details(inst))


def verify_mixed_law(inst: BimonadInstance, exact: bool = True) -> LawReport:
    W = inst.whiskered()
    law = _law(exact)
    return LawReport.suite("mixed_law", [
        law("mixed.unit", compose(W.eta, inst.lam), T(inst.eta)),
        law("mixed.counit", compose(inst.lam, W.eps), T(inst.eps)),
        law("mixed.multiplication", compose(W.mu, inst.lam), compose(T(inst.lam), W.lam, T(inst.mu))),
        law("mixed.comultiplication", compose(inst.lam, W.delta), compose(T(inst.delta), W.lam, T(inst.lam))),
    ], details=_details(inst))


def verify_bimonad_compatibility(inst: BimonadInstance, exact: bool = True) -> LawReport:
    """The monad/comonad compatibilities a bimonad asks for beyond the mixed law."""
    W = inst.whiskered()
    law = _law(exact)
    return LawReport.suite("bimonad_compat", [
        law("bimonad.mult_comult", compose(inst.mu, inst.delta), compose(T(inst.delta), W.lam, T(inst.mu))),
        law("bimonad.mult_counit", compose(inst.mu, inst.eps), compose(T(inst.eps), inst.eps)),
        law("bimonad.unit_comult", compose(inst.eta, inst.delta), compose(inst.eta, T(inst.eta))),
        law("bimonad.unit_counit", compose(inst.eta, inst.eps), identity(inst.n)),
    ], details=_details(inst))


def verify_bimonad(inst: BimonadInstance, exact: bool = True) -> LawReport:
    return LawReport.suite("jubin", [
        verify_monad_laws(inst, exact),
        verify_comonad_laws(inst, exact),
        verify_mixed_law(inst, exact),
        verify_bimonad_compatibility(inst, exact),
    ], details=_details(inst))
