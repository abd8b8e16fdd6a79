"""Randomised checks of the jet pullback map ``P_k``.

Two experiments live here.  :func:`key_observation_check` perturbs
coefficients of degree ``> k`` and confirms the order-k germ does not move
(bit-exactly).  :func:`jacobian_rank` assembles a central finite-difference
Jacobian of ``P_k`` in real coordinates and counts singular values above a
relative threshold.  ``P_k`` itself is always evaluated exactly; floats only
appear once a Jacobian column has been formed.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
from gmpy2 import mpq

from . import errors
from .jets import AlgebraicModel, CrSignature, MapJet, jet_pullback
from .series import SeriesVector, TruncatedSeries, to_fraction

__all__ = [
    "ExperimentConfig",
    "Coordinate",
    "RankReport",
    "StabilityReport",
    "source_coordinates",
    "target_coordinates",
    "build_jet",
    "jet_coordinates",
    "germ_vector",
    "evaluate_pk",
    "sample_coordinates",
    "sample_map",
    "sample_model",
    "key_observation_check",
    "key_observation_plan",
    "perturbation_changes_germ",
    "finite_difference_jacobian",
    "jacobian_rank",
]


@dataclass(frozen=True)
class ExperimentConfig:
    signature: CrSignature
    seed: int = 0
    trials: int = 1
    coefficient_bound: int = 3
    fd_step: float = 1e-6
    sv_rel_tol: float = 1e-8
    density: float = 1.0
    perturbation_bound: int | None = None
    workers: int = 1
    equilibrate: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise errors.ValidationError("trials must be >= 1")
        if self.coefficient_bound < 0:
            raise errors.ValidationError("coefficient_bound must be >= 0")
        if not self.fd_step > 0:
            raise errors.ValidationError("fd_step must be positive")
        if not 0 < self.sv_rel_tol < 1:
            raise errors.ValidationError("sv_rel_tol must lie in (0, 1)")
        if not 0 < self.density <= 1:
            raise errors.ValidationError("density must lie in (0, 1]")
        if not 0 <= self.seed < 2**64:
            raise errors.ValidationError("seed must be a 64-bit unsigned integer")

    @property
    def perturbation(self) -> int:
        return self.coefficient_bound if self.perturbation_bound is None else self.perturbation_bound

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        data = dict(data)
        sig = data.pop("signature")
        if not isinstance(sig, CrSignature):
            sig = CrSignature(**sig)
        return cls(signature=sig, **data)

    def to_dict(self) -> dict:
        return asdict(self)


class Coordinate(NamedTuple):
    """One real coordinate of the source: a real or imaginary coefficient part."""

    block: str  # "f", "g" or "rho"
    component: int
    exponents: tuple[int, ...]
    part: str  # "re" or "im"

    @property
    def degree(self) -> int:
        return sum(self.exponents)


def _monomials(nvars: int, lo: int, hi: int):
    for deg in range(lo, hi + 1):
        for exps in itertools.product(range(deg, -1, -1), repeat=nvars):
            if sum(exps) == deg:
                yield exps


def _conjugate_exponents(space, exps):
    out = [0] * len(exps)
    for i, e in enumerate(exps):
        out[space.conjugation[i]] = e
    return tuple(out)


def source_coordinates(sig: CrSignature, order: int | None = None) -> list[Coordinate]:
    """Real coordinates of ``H_k x A``: free parts of ``f``, ``g~`` and ``rho~``.

    ``rho~`` is parametrised on conjugation orbits: a self-conjugate
    monomial has one real coefficient, a pair ``{a, conj a}`` carries the
    real and imaginary part of the coefficient of its lexicographically
    larger member.
    """
    k = sig.k if order is None else order
    coords = []
    for c in range(sig.mprime):
        for exps in _monomials(sig.n, 1, k):
            coords += [Coordinate("f", c, exps, "re"), Coordinate("f", c, exps, "im")]
    for c in range(sig.d):
        for exps in _monomials(sig.n, 2, k):
            coords += [Coordinate("g", c, exps, "re"), Coordinate("g", c, exps, "im")]
    space = sig.target_space
    for c in range(sig.d):
        for exps in _monomials(len(space), 2, sig.nu):
            mirror = _conjugate_exponents(space, exps)
            if mirror == exps:
                coords.append(Coordinate("rho", c, exps, "re"))
            elif exps > mirror:
                coords += [Coordinate("rho", c, exps, "re"), Coordinate("rho", c, exps, "im")]
    return coords


def target_coordinates(sig: CrSignature) -> list[tuple[int, tuple[int, ...]]]:
    """Coordinates of ``R_k``: (component, monomial in (x, y, u)), degrees 2..k."""
    nreal = 2 * sig.m + sig.d
    return [(c, exps) for c in range(sig.d) for exps in _monomials(nreal, 2, sig.k)]


def build_jet(
    sig: CrSignature,
    coords: Sequence[Coordinate],
    values: Sequence,
    order: int | None = None,
    model_order: int | None = None,
) -> tuple[MapJet, AlgebraicModel]:
    """Assemble ``(F, model)`` with ``g = w + g~`` from coordinate values."""
    k = sig.k if order is None else order
    nu_order = sig.nu if model_order is None else model_order
    f = [dict() for _ in range(sig.mprime)]
    g = [dict() for _ in range(sig.d)]
    rho = [dict() for _ in range(sig.d)]
    blocks = {"f": f, "g": g, "rho": rho}
    for coord, value in zip(coords, values, strict=True):
        slot = blocks[coord.block][coord.component].setdefault(coord.exponents, [0, 0])
        slot[0 if coord.part == "re" else 1] = value
    for c in range(sig.d):
        e = [0] * sig.n
        e[sig.m + c] = 1
        g[c][tuple(e)] = [1, 0]
    tspace = sig.target_space
    rho_terms = []
    for terms in rho:
        full = {}
        for exps, (re, im) in terms.items():
            full[exps] = (re, im)
            mirror = _conjugate_exponents(tspace, exps)
            if mirror != exps:
                full[mirror] = (re, -im)
        rho_terms.append(full)
    space = sig.source_space
    jet_sig = sig.with_order(k)
    F = MapJet(
        jet_sig,
        SeriesVector(TruncatedSeries(space, k, {e: tuple(v) for e, v in t.items()}) for t in f),
        SeriesVector(TruncatedSeries(space, k, {e: tuple(v) for e, v in t.items()}) for t in g),
    )
    model = AlgebraicModel(
        jet_sig, SeriesVector(TruncatedSeries(tspace, nu_order, t) for t in rho_terms)
    )
    return F, model


def jet_coordinates(F: MapJet, model: AlgebraicModel, coords: Sequence[Coordinate]) -> list:
    out = []
    for coord in coords:
        if coord.block == "f":
            c = F.f[coord.component].coefficient(coord.exponents)
        elif coord.block == "g":
            c = F.g[coord.component].coefficient(coord.exponents)
        else:
            c = model.rho_tilde[coord.component].coefficient(coord.exponents)
        out.append(c.re if coord.part == "re" else c.im)
    return out


def germ_vector(r: SeriesVector, targets) -> list:
    return [r[c].coefficient(exps).re for c, exps in targets]


def evaluate_pk(sig: CrSignature, coords, values, targets=None) -> list:
    """``P_k`` in coordinates: exact germ coefficients for given source values."""
    targets = target_coordinates(sig) if targets is None else targets
    F, model = build_jet(sig, coords, values)
    return germ_vector(jet_pullback(F, model).r, targets)


# ---------------------------------------------------------------------------
# sampling


def _rational(rng: np.random.Generator, bound: int):
    num = int(rng.integers(-bound, bound + 1))
    den = int(rng.integers(1, max(bound, 1) + 1))
    return mpq(num, den)


def sample_coordinates(config: ExperimentConfig, rng: np.random.Generator, coords) -> list:
    """Random rational values for ``coords``.

    Draws with an identically zero linear part of ``f`` are rejected; the
    linear part is then redrawn with bound ``max(1, coefficient_bound)`` so
    a zero bound still yields a candidate embedding.
    """
    bound = config.coefficient_bound
    values = []
    for _ in coords:
        if config.density < 1 and rng.random() >= config.density:
            values.append(mpq(0))
        else:
            values.append(_rational(rng, bound))
    linear = [i for i, c in enumerate(coords) if c.block == "f" and c.degree == 1]
    while linear and all(values[i] == 0 for i in linear):
        for i in linear:
            values[i] = _rational(rng, max(1, bound))
    return values


def _rng(config: ExperimentConfig, trial: int) -> np.random.Generator:
    return np.random.default_rng([config.seed, trial])


def sample_map(config: ExperimentConfig, trial: int = 0, order: int | None = None) -> MapJet:
    """A random normalized map jet, determined by ``(config.seed, trial)``."""
    sig = config.signature
    coords = [c for c in source_coordinates(sig, order) if c.block != "rho"]
    values = sample_coordinates(config, _rng(config, trial), coords)
    return build_jet(sig, coords, values, order)[0]


def sample_model(config: ExperimentConfig, trial: int = 0) -> AlgebraicModel:
    """A random real model on the conjugation-orbit basis of degrees ``2..nu``."""
    sig = config.signature
    coords = [c for c in source_coordinates(sig) if c.block == "rho"]
    rng = np.random.default_rng([config.seed, trial, 1])
    values = [_rational(rng, config.coefficient_bound) for _ in coords]
    return build_jet(sig, coords, values)[1]


# ---------------------------------------------------------------------------
# key observation


@dataclass
class StabilityReport:
    signature: CrSignature
    seed: int
    trials: int
    failures: int = 0
    max_delta: Fraction = Fraction(0)
    converse_changed: int = 0
    failed_trials: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["max_delta"] = {"num": self.max_delta.numerator, "den": self.max_delta.denominator}
        return out


def _max_delta(a: SeriesVector, b: SeriesVector) -> Fraction:
    best = Fraction(0)
    for ca, cb in zip(a, b):
        for _, c in ca - cb:
            best = max(best, to_fraction(abs(c.re)))
    return best


def perturbation_changes_germ(F: MapJet, model: AlgebraicModel, coord: Coordinate, delta) -> bool:
    """Whether adding ``delta`` to one source coordinate changes ``P_k``."""
    sig = F.signature
    coords = source_coordinates(sig, F.f.order)
    values = jet_coordinates(F, model, coords)
    idx = coords.index(coord)
    values[idx] = values[idx] + mpq(delta)
    F2, model2 = build_jet(sig, coords, values, F.f.order, model.rho_tilde.order)
    k = sig.k
    return jet_pullback(F2, model2).r.truncate(k) != jet_pullback(F, model).r.truncate(k)


def key_observation_check(config: ExperimentConfig, strict: bool = True) -> StabilityReport:
    """Order-k germs ignore all source coefficients of degree ``> k``.

    Each trial samples ``(F, model)`` at working order ``k + 3``, perturbs
    every coefficient of degree ``k+1..k+3`` of ``F`` (and of ``rho~`` when
    ``nu > k``), and compares the order-k truncations of both germs.  The
    converse probe perturbs one random coefficient of degree ``<= k`` and
    counts the trials where the germ moved.
    """
    sig = config.signature
    k = sig.k
    work = k + 3
    coords = source_coordinates(sig, work)
    high = [i for i, c in enumerate(coords) if c.degree > k]
    low = [i for i, c in enumerate(coords) if c.degree <= k]
    report = StabilityReport(sig, config.seed, config.trials)
    bound = config.perturbation
    for trial in range(config.trials):
        rng = _rng(config, trial)
        values = sample_coordinates(config, rng, coords)
        F, model = build_jet(sig, coords, values, work)
        base = jet_pullback(F, model).r.truncate(k)

        perturbed = list(values)
        for i in high:
            perturbed[i] += _rational(rng, bound)
        F2, model2 = build_jet(sig, coords, perturbed, work)
        moved = jet_pullback(F2, model2).r.truncate(k)
        if moved != base:
            report.failures += 1
            report.failed_trials.append(trial)
            report.max_delta = max(report.max_delta, _max_delta(base, moved))

        probe = list(values)
        i = low[int(rng.integers(len(low)))]
        probe[i] += mpq(int(rng.integers(1, max(bound, 1) + 1)), int(rng.integers(1, max(bound, 1) + 1)))
        F3, model3 = build_jet(sig, coords, probe, work)
        if jet_pullback(F3, model3).r.truncate(k) != base:
            report.converse_changed += 1
    if strict and report.failures:
        raise errors.StabilityViolation(
            f"order-{k} germ changed under degree > {k} perturbations "
            f"(seed {config.seed}, trials {report.failed_trials})"
        )
    return report


def key_observation_plan(total: int = 1000, seed: int = 0, **options) -> list[ExperimentConfig]:
    """Configs covering every signature with ``n, n' <= 3``, ``nu <= 3``, ``k <= 5``.

    ``total`` trials are split by cost: signatures with ``n = 2`` get the
    bulk, ``n = 3`` gets fewer trials at ``k <= 3`` and a handful at
    ``k >= 4``, where one exact trial takes seconds.  Every config gets at
    least one trial.
    """
    cells = []
    for m, d in ((1, 1), (1, 2), (2, 1)):
        for mprime in range(m, 4 - d):
            for nu in (2, 3):
                for k in (2, 3, 4, 5):
                    sig = CrSignature(m, d, mprime, nu, k)
                    weight = 13 if sig.n == 2 else (4 if k <= 3 else 1)
                    cells.append((sig, weight))
    scale = total / sum(w for _, w in cells)
    counts = [max(1, int(w * scale)) for _, w in cells]
    # hand the rounding remainder to the cheapest cells first
    i = 0
    while sum(counts) < total:
        counts[i % len(counts)] += 1
        i += 1
    return [
        ExperimentConfig(sig, seed=seed, trials=n, **options)
        for (sig, _), n in zip(cells, counts)
    ]


# ---------------------------------------------------------------------------
# Jacobian rank


@dataclass
class RankReport:
    signature: CrSignature
    seed: int
    trial: int
    jacobian_rows: int
    jacobian_cols: int
    numerical_rank: int
    sigma_max: float
    threshold: float
    singular_values: list[float]
    equilibrated: bool = True
    raw_numerical_rank: int = 0

    @property
    def rank_deficient(self) -> bool:
        return self.numerical_rank < self.jacobian_rows

    def to_dict(self) -> dict:
        return asdict(self)


def _exact(x: float):
    f = Fraction(repr(float(x)))
    return mpq(f.numerator, f.denominator)


def _fd_column(args):
    sig, coords, values, targets, j, step = args
    x = values[j]
    mag = abs(x)
    h = step * (mag if mag > 1 else 1)
    for attempt in range(2):
        try:
            plus = list(values)
            minus = list(values)
            plus[j] = x + h
            minus[j] = x - h
            up = evaluate_pk(sig, coords, plus, targets)
            down = evaluate_pk(sig, coords, minus, targets)
        except errors.CRJetError as exc:
            if attempt:
                raise errors.DegenerateEvaluation(
                    f"P_k failed near coordinate {coords[j]} with step {h}: {exc}"
                ) from exc
            h = h / 2
            continue
        return [float((a - b) / (2 * h)) for a, b in zip(up, down)]


def finite_difference_jacobian(sig: CrSignature, values, fd_step: float = 1e-6, workers: int = 1):
    """Central-difference Jacobian of ``P_k`` at ``values`` (rows: R_k, cols: source)."""
    coords = source_coordinates(sig)
    targets = target_coordinates(sig)
    step = _exact(fd_step)
    jobs = [(sig, coords, list(values), targets, j, step) for j in range(len(coords))]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            columns = list(pool.map(_fd_column, jobs))
    else:
        columns = [_fd_column(job) for job in jobs]
    return np.array(columns, dtype=float).reshape(len(coords), len(targets)).T


def jacobian_rank(
    config: ExperimentConfig,
    at: tuple[MapJet, AlgebraicModel] | None = None,
    trial: int = 0,
) -> RankReport:
    """Numerical rank of ``dP_k`` at a sampled (or given) point.

    Counts singular values ``>= sv_rel_tol * sigma_max`` of the
    equilibrated Jacobian (see :func:`_equilibrate`); the count on the raw
    matrix is kept as ``raw_numerical_rank``.
    """
    sig = config.signature
    coords = source_coordinates(sig)
    if at is None:
        values = sample_coordinates(config, _rng(config, trial), coords)
    else:
        values = jet_coordinates(*at, coords)
    jac = finite_difference_jacobian(sig, values, config.fd_step, config.workers)
    raw_rank = _numerical_rank(_singular_values(jac), config.sv_rel_tol)
    matrix = _equilibrate(jac) if config.equilibrate else jac
    sv = _singular_values(matrix)
    sigma_max = float(sv[0]) if sv.size else 0.0
    return RankReport(
        signature=sig,
        seed=config.seed,
        trial=trial,
        jacobian_rows=jac.shape[0],
        jacobian_cols=jac.shape[1],
        numerical_rank=_numerical_rank(sv, config.sv_rel_tol),
        sigma_max=sigma_max,
        threshold=config.sv_rel_tol * sigma_max,
        singular_values=[float(x) for x in sv],
        equilibrated=config.equilibrate,
        raw_numerical_rank=raw_rank,
    )


def _singular_values(matrix):
    return np.linalg.svd(matrix, compute_uv=False) if matrix.size else np.zeros(0)


def _numerical_rank(sv, rel_tol: float) -> int:
    if not sv.size or sv[0] <= 0:
        return 0
    return int(np.count_nonzero(sv >= rel_tol * sv[0]))


def _equilibrate(jac):
    """Scale rows, then columns, to unit Euclidean norm (zero lines stay zero).

    Germ coefficients of degree j grow like the j-th power of the input
    size, so unscaled rows span many orders of magnitude and a relative
    cutoff only sees the largest ones.  Nonsingular diagonal scaling does
    not change the rank.
    """
    out = np.array(jac, dtype=float)
    rows = np.linalg.norm(out, axis=1)
    rows[rows == 0] = 1.0
    out /= rows[:, None]
    cols = np.linalg.norm(out, axis=0)
    cols[cols == 0] = 1.0
    out /= cols[None, :]
    return out
