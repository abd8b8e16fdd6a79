"""Algebraic models, holomorphic map jets and their graph-form preimages.

The pipeline realised by :func:`jet_pullback` is

1. :func:`normalize_linear_part` -- rescale ``g = Bw + g~`` to ``w + B^-1 g~``
   and compensate in the model;
2. :func:`pullback_defining_series` -- ``Im g + rho~(f, conj f, g, conj g)``
   in real coordinates, which has the shape ``v - r'(x, y, u, v)``;
3. :func:`graph_iteration` -- solve ``v = r'(x, y, u, v)`` by the fixed-point
   iteration ``v^0 = 0``, ``v^(j+1) = r'(x, y, u, v^j)``.

Everything here runs in exact arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from gmpy2 import mpq

from . import errors
from .series import (
    EXACT,
    Coefficient,
    SeriesVector,
    TruncatedSeries,
    VariableSpace,
    constant,
    embed,
    realify,
    substitute,
    variable,
)
from . import series as _series

__all__ = [
    "CrSignature",
    "AlgebraicModel",
    "MapJet",
    "GraphGerm",
    "PullbackResult",
    "validate_model",
    "validate_map",
    "linear_parts",
    "normalize_linear_part",
    "raw_pullback",
    "pullback_defining_series",
    "graph_iteration",
    "pullback",
    "jet_pullback",
    "is_jet_preimage",
    "differential_has_full_rank",
    "heisenberg_model",
    "flat_model",
    "identity_map",
]

holomorphic_space = lru_cache(maxsize=None)(_series.holomorphic_space)
complex_space = lru_cache(maxsize=None)(_series.complex_space)
real_space = lru_cache(maxsize=None)(_series.real_space)
graph_space = lru_cache(maxsize=None)(_series.graph_space)


@dataclass(frozen=True)
class CrSignature:
    """Dimensions of a source/target pair.

    ``m``/``d``: CR dimension and codimension of the source germ in C^n,
    ``mprime``: CR dimension of the target model in C^n' (same ``d``),
    ``nu``: maximal degree of the model polynomials, ``k``: jet order.
    """

    m: int
    d: int
    mprime: int
    nu: int
    k: int

    def __post_init__(self):
        for name in ("m", "d", "mprime", "nu", "k"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise errors.ValidationError(f"{name} must be an integer, got {value!r}")
        if self.m < 1:
            raise errors.ValidationError("CR dimension m must be >= 1")
        if self.d < 1:
            raise errors.ValidationError("codimension d must be >= 1")
        if self.mprime < self.m:
            raise errors.ValidationError("target CR dimension mprime must be >= m")
        if self.nu < 2:
            raise errors.ValidationError("model degree nu must be >= 2")
        if self.k < 2:
            raise errors.ValidationError("jet order k must be >= 2")

    @property
    def n(self) -> int:
        return self.m + self.d

    @property
    def nprime(self) -> int:
        return self.mprime + self.d

    def with_order(self, k: int) -> CrSignature:
        return CrSignature(self.m, self.d, self.mprime, self.nu, k)

    @property
    def source_space(self) -> VariableSpace:
        return holomorphic_space(self.m, self.d)

    @property
    def source_complex_space(self) -> VariableSpace:
        return complex_space(self.m, self.d)

    @property
    def target_space(self) -> VariableSpace:
        return complex_space(self.mprime, self.d)

    @property
    def real_space(self) -> VariableSpace:
        return real_space(self.m, self.d)

    @property
    def graph_space(self) -> VariableSpace:
        return graph_space(self.m, self.d)


@dataclass(frozen=True)
class AlgebraicModel:
    """The real algebraic model ``Im w' + rho~(z', ~z', w', ~w') = 0``.

    ``rho_tilde`` holds ``d`` polynomials in ``signature.target_space``.
    Names in the target space carry no primes; the space itself tells
    source and target coordinates apart.
    """

    signature: CrSignature
    rho_tilde: SeriesVector

    def __post_init__(self):
        object.__setattr__(self, "rho_tilde", SeriesVector(self.rho_tilde))

    def defining_function(self) -> SeriesVector:
        """The full ``rho = Im w' + rho~``."""
        space = self.signature.target_space
        order = self.rho_tilde.order
        out = []
        for i, comp in enumerate(self.rho_tilde, start=1):
            w = variable(space, f"w{i}", order)
            wb = variable(space, f"~w{i}", order)
            out.append((w - wb) / (0, 2) + comp)
        return SeriesVector(out)


@dataclass(frozen=True)
class MapJet:
    """Order-k jet of ``F = (f, g): (C^n, 0) -> (C^n', 0)``."""

    signature: CrSignature
    f: SeriesVector
    g: SeriesVector

    def __post_init__(self):
        object.__setattr__(self, "f", SeriesVector(self.f))
        object.__setattr__(self, "g", SeriesVector(self.g))

    @property
    def normalized(self) -> bool:
        """True iff ``g = w + O(2)``."""
        z_part, b = linear_parts(self)
        d = self.signature.d
        return all(c.is_zero for row in z_part for c in row) and all(
            b[i][j] == Coefficient(int(i == j)) for i in range(d) for j in range(d)
        )


@dataclass(frozen=True)
class GraphGerm:
    """Graph-form germ ``v = r(x, y, u)`` truncated at order k."""

    r: SeriesVector
    signature: CrSignature | None = field(default=None, compare=False)

    def __post_init__(self):
        r = SeriesVector(self.r)
        object.__setattr__(self, "r", r)
        if not r.space.is_real:
            raise errors.ValidationError("a graph germ lives in real coordinates")
        if not r.is_real:
            raise errors.ValidationError("graph germ coefficients must be real")
        for comp in r:
            low = comp.min_degree()
            if low is not None and low < 2:
                raise errors.HasLowOrderTerms("graph germs have no constant or linear terms")

    @property
    def order(self) -> int:
        return self.r.order

    def to_text(self) -> str:
        return "; ".join(c.to_text() for c in self.r)


@dataclass(frozen=True)
class PullbackResult:
    defining: SeriesVector
    germ: GraphGerm
    iterations_used: int


# ---------------------------------------------------------------------------
# small exact linear algebra over Q


def _inverse(matrix: list[list]) -> list[list] | None:
    n = len(matrix)
    a = [[mpq(x) for x in row] + [mpq(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _rank(matrix: list[list]) -> int:
    a = [[mpq(x) for x in row] for row in matrix]
    rank = 0
    cols = len(a[0]) if a else 0
    for col in range(cols):
        pivot = next((r for r in range(rank, len(a)) if a[r][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        for r in range(rank + 1, len(a)):
            if a[r][col] != 0:
                factor = a[r][col] / a[rank][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# validation


def validate_model(model: AlgebraicModel) -> AlgebraicModel:
    """Return ``model`` if ``rho~`` is real, ``O(2)`` and of degree ``<= nu``."""
    sig = model.signature
    rho = model.rho_tilde
    if len(rho) != sig.d:
        raise errors.SignatureMismatch(f"model has {len(rho)} components, expected d={sig.d}")
    if rho.space != sig.target_space:
        raise errors.SignatureMismatch(
            f"model space {rho.space.names} is not {sig.target_space.names}"
        )
    if rho.mode != EXACT:
        raise errors.ValidationError("models are exact-mode only")
    if rho.order < sig.nu:
        raise errors.ValidationError(f"model truncation order {rho.order} < nu={sig.nu}")
    for i, comp in enumerate(rho, start=1):
        low = comp.min_degree()
        if low is not None and low < 2:
            raise errors.HasLowOrderTerms(f"rho~_{i} has terms of degree {low}")
        top = comp.degree()
        if top is not None and top > sig.nu:
            raise errors.DegreeExceeded(f"rho~_{i} has degree {top} > nu={sig.nu}")
        if comp.conjugate() != comp:
            raise errors.NonRealModel(f"rho~_{i} is not fixed by conjugation")
    return model


def validate_map(F: MapJet) -> MapJet:
    """Return ``F`` if its components have the right shape and vanish at 0."""
    sig = F.signature
    if len(F.f) != sig.mprime or len(F.g) != sig.d:
        raise errors.SignatureMismatch(
            f"map has {len(F.f)}+{len(F.g)} components, expected {sig.mprime}+{sig.d}"
        )
    for part in (F.f, F.g):
        if part.space != sig.source_space:
            raise errors.SignatureMismatch(
                f"map space {part.space.names} is not {sig.source_space.names}"
            )
        if part.order != sig.k:
            raise errors.SignatureMismatch(f"map order {part.order} differs from k={sig.k}")
        if part.mode != EXACT:
            raise errors.ValidationError("map jets are exact-mode only")
        for comp in part:
            if not comp.constant_term().is_zero:
                raise errors.InvalidMap("F(0) must be 0")
    return F


def linear_parts(F: MapJet) -> tuple[list[list], list[list]]:
    """Coefficients of ``z`` and of ``w`` in the components of ``g``."""
    sig = F.signature
    n = sig.n

    def unit(j):
        e = [0] * n
        e[j] = 1
        return tuple(e)

    z_part = [[g.coefficient(unit(j)) for j in range(sig.m)] for g in F.g]
    b = [[g.coefficient(unit(sig.m + j)) for j in range(sig.d)] for g in F.g]
    return z_part, b


def differential_has_full_rank(F: MapJet) -> bool:
    """Diagnostic: is ``dF(0)`` injective (an immersion at 0)?"""
    sig = F.signature
    n = sig.n
    rows = []
    for comp in list(F.f) + list(F.g):
        re_row, im_row = [], []
        for j in range(n):
            e = [0] * n
            e[j] = 1
            c = comp.coefficient(tuple(e))
            # complex-linear map as a real 2x2 block [[a, -b], [b, a]]
            re_row += [c.re, -c.im]
            im_row += [c.im, c.re]
        rows += [re_row, im_row]
    return _rank(rows) == 2 * n


# ---------------------------------------------------------------------------
# the pipeline


def normalize_linear_part(F: MapJet, model: AlgebraicModel) -> tuple[MapJet, AlgebraicModel]:
    """Replace ``g = Bw + g~`` by ``B^-1 g`` and ``rho`` by ``B^-1 rho(z', Bw')``.

    The preimage germ is unchanged.  Returns the inputs themselves when
    ``B`` is already the identity.
    """
    if F.signature != model.signature:
        raise errors.SignatureMismatch("map and model signatures differ")
    z_part, b = linear_parts(F)
    if any(not c.is_zero for row in z_part for c in row):
        raise errors.NonzeroZLinearPart("g has a linear term in z; F is not tangential")
    if any(not c.is_real for row in b for c in row):
        raise errors.ComplexLinearPart("the w-linear part B of g must be a real matrix")
    b_real = [[c.re for c in row] for row in b]
    b_inv = _inverse(b_real)
    if b_inv is None:
        raise errors.SingularLinearPart("B is singular: F is not transverse to the model")
    d = F.signature.d
    if all(b_real[i][j] == (1 if i == j else 0) for i in range(d) for j in range(d)):
        return F, model

    g_star = [
        _combine(b_inv[i], F.g) for i in range(d)
    ]
    space = model.signature.target_space
    order = model.rho_tilde.order
    ws = [variable(space, f"w{j + 1}", order) for j in range(d)]
    wbs = [variable(space, f"~w{j + 1}", order) for j in range(d)]
    bindings = {}
    for i in range(d):
        bindings[f"w{i + 1}"] = _combine(b_real[i], ws)
        bindings[f"~w{i + 1}"] = _combine(b_real[i], wbs)
    rho_sub = [substitute(comp, bindings) for comp in model.rho_tilde]
    rho_star = [_combine(b_inv[i], rho_sub) for i in range(d)]
    return (
        MapJet(F.signature, F.f, SeriesVector(g_star)),
        AlgebraicModel(model.signature, SeriesVector(rho_star)),
    )


def _combine(row, series) -> TruncatedSeries:
    acc = None
    for c, s in zip(row, series):
        if c == 0:
            continue
        term = s.scale(c)
        acc = term if acc is None else acc + term
    if acc is None:
        first = series[0]
        acc = constant(first.space, 0, first.order, first.mode)
    return acc


def raw_pullback(F: MapJet, model: AlgebraicModel) -> SeriesVector:
    """``Im g + rho~(f, conj f, g, conj g)`` in ``(x, y, u, v)``, for any ``B``.

    Conjugation and substitution happen in ``(z, ~z, w, ~w)``, where ``f``
    and ``g`` stay sparse; the result is realified once at the end.
    """
    if F.signature != model.signature:
        raise errors.SignatureMismatch("map and model signatures differ")
    sig = F.signature
    cspace = sig.source_complex_space
    f_c = [embed(c, cspace) for c in F.f]
    g_c = [embed(c, cspace) for c in F.g]
    bindings = {}
    for j, fc in enumerate(f_c, start=1):
        bindings[f"z{j}"] = fc
        bindings[f"~z{j}"] = fc.conjugate()
    for j, gc in enumerate(g_c, start=1):
        bindings[f"w{j}"] = gc
        bindings[f"~w{j}"] = gc.conjugate()
    out = []
    for gc, rho in zip(g_c, model.rho_tilde):
        im_g = (gc - gc.conjugate()) / (0, 2)
        total = realify(im_g + substitute(rho, bindings), sig.real_space)
        if not total.is_real:
            raise errors.NonRealPullback("pullback of a real model has non-real coefficients")
        out.append(total)
    return SeriesVector(out)


def pullback_defining_series(F: MapJet, model: AlgebraicModel) -> SeriesVector:
    """``rho(f, conj f, g, conj g) = v - r'(x, y, u, v)`` for a normalized ``F``."""
    validate_map(F)
    validate_model(model)
    if not F.normalized:
        raise errors.NotNormalized("F must satisfy g = w + O(2); call normalize_linear_part")
    return raw_pullback(F, model)


def _v_names(space: VariableSpace) -> list[str]:
    return [name for name in space.names if name.startswith("v")]


def graph_iteration(defining: SeriesVector, k: int | None = None) -> PullbackResult:
    """Solve ``v = r'(x, y, u, v)`` where ``defining = v - r'``.

    Iterates ``v^(j+1) = r'(x, y, u, v^j)`` from ``v^0 = 0`` until two
    consecutive iterates agree at order ``k``.  ``iterations_used`` is the
    first ``j`` with ``v^j = v^(j+1)``.
    """
    defining = SeriesVector(defining)
    if k is None:
        k = defining.order
    if k > defining.order:
        raise errors.ValidationError(f"cannot solve at order {k} > {defining.order}")
    defining = defining.truncate(k)
    space = defining.space
    v_names = _v_names(space)
    if len(v_names) != len(defining):
        raise errors.NotInGraphShape(
            f"{len(defining)} equations but {len(v_names)} v-variables in {space.names}"
        )
    out_space = VariableSpace.real([n for n in space.names if not n.startswith("v")])

    r_prime = []
    for name, eq in zip(v_names, defining):
        low = eq.homogeneous_part(0, 1)
        if low != variable(space, name, k, eq.mode):
            raise errors.NotInGraphShape(
                f"equation for {name} must be {name} + O(2), has linear part {low.to_text()}"
            )
        r_prime.append(variable(space, name, k, eq.mode) - eq)

    zero = constant(out_space, 0, k, defining.mode)
    current = [zero] * len(v_names)
    for j in range(k + 1):
        bindings = dict(zip(v_names, current))
        nxt = [substitute(rp, bindings) for rp in r_prime]
        if nxt == current:
            germ = GraphGerm(SeriesVector(current))
            return PullbackResult(defining, germ, j)
        current = nxt
    raise errors.NoStabilization(f"graph iteration did not stabilise within {k + 1} steps")


def pullback(F: MapJet, model: AlgebraicModel) -> PullbackResult:
    """Full pipeline with the intermediate defining series."""
    validate_map(F)
    validate_model(model)
    F_star, model_star = normalize_linear_part(F, model)
    defining = pullback_defining_series(F_star, model_star)
    result = graph_iteration(defining, F.signature.k)
    germ = GraphGerm(result.germ.r, F.signature)
    return PullbackResult(result.defining, germ, result.iterations_used)


def jet_pullback(F: MapJet, model: AlgebraicModel) -> GraphGerm:
    """The polynomial map ``(F_k, rho) -> r_k``: graph germ of ``F^-1(model)``."""
    return pullback(F, model).germ


def is_jet_preimage(F: MapJet, model: AlgebraicModel, germ: GraphGerm) -> bool:
    """Whether ``germ`` is exactly the order-k preimage of ``model`` under ``F``."""
    sig = F.signature
    if germ.signature is not None and germ.signature != sig:
        raise errors.SignatureMismatch("germ and map signatures differ")
    if germ.r.space != sig.graph_space or germ.r.order != sig.k or len(germ.r) != sig.d:
        raise errors.SignatureMismatch("germ does not live in the map's graph jet space")
    return jet_pullback(F, model).r == germ.r


# ---------------------------------------------------------------------------
# standard inputs


def identity_map(sig: CrSignature) -> MapJet:
    """``(z, 0, ..., 0, w)``: the inclusion C^n -> C^n'."""
    space, k = sig.source_space, sig.k
    zero = constant(space, 0, k)
    f = [variable(space, f"z{j + 1}", k) for j in range(sig.m)]
    f += [zero] * (sig.mprime - sig.m)
    g = [variable(space, f"w{j + 1}", k) for j in range(sig.d)]
    return MapJet(sig, SeriesVector(f), SeriesVector(g))


def flat_model(sig: CrSignature) -> AlgebraicModel:
    zero = constant(sig.target_space, 0, sig.nu)
    return AlgebraicModel(sig, SeriesVector([zero] * sig.d))


def heisenberg_model(sig: CrSignature) -> AlgebraicModel:
    """``Im w'_j = |z'|^2`` in every component: ``rho~_j = -sum z'_i ~z'_i``."""
    space, nu = sig.target_space, sig.nu
    total = constant(space, 0, nu)
    for i in range(sig.mprime):
        total = total - variable(space, f"z{i + 1}", nu) * variable(space, f"~z{i + 1}", nu)
    return AlgebraicModel(sig, SeriesVector([total] * sig.d))
