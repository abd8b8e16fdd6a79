"""Truncated multivariate power series with Gaussian-rational coefficients.

A series lives in a :class:`VariableSpace` and carries a fixed truncation
order ``k``: every stored monomial has total degree ``<= k``.  Coefficients
are kept as two sparse dictionaries (real and imaginary parts) keyed by a
packed integer encoding of the exponent vector.  The total degree occupies
the most significant bits of the key, so adding two keys multiplies the
monomials and ``key < (k + 1) << shift`` is the truncation test.

Two scalar modes exist: ``"exact"`` (``gmpy2.mpq``) and ``"float"``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from numbers import Rational
from typing import Iterable, Iterator, Mapping

from gmpy2 import lcm, mpq, mpz

__all__ = [
    "EXACT",
    "FLOAT",
    "to_fraction",
    "Coefficient",
    "VariableSpace",
    "TruncatedSeries",
    "SeriesVector",
    "SeriesError",
    "monomial",
    "constant",
    "variable",
    "add",
    "mul",
    "conjugate",
    "substitute",
    "embed",
    "realify",
    "weighted_norm",
    "holomorphic_space",
    "complex_space",
    "real_space",
    "graph_space",
]

EXACT = "exact"
FLOAT = "float"
_MODES = (EXACT, FLOAT)

HOLOMORPHIC = "holomorphic"
ANTIHOLOMORPHIC = "antiholomorphic"
REAL = "real"

_BITS = 16
_MASK = (1 << _BITS) - 1
MAX_ORDER = (1 << (_BITS - 1)) - 1

# re/im part names used by realify for each holomorphic prefix
REAL_PARTS = {"z": ("x", "y"), "w": ("u", "v")}


class SeriesError(ValueError):
    """Incompatible operands or malformed series input."""


def _scalar(value, mode):
    if mode == EXACT:
        if isinstance(value, float):
            return mpq(Fraction(value))
        if isinstance(value, str):
            return mpq(Fraction(value.strip()))
        if isinstance(value, Rational) or type(value).__name__ == "mpz":
            return mpq(value)
        if type(value).__name__ == "mpq":
            return value
        raise SeriesError(f"cannot use {value!r} as an exact scalar")
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


def _split(value, mode):
    """Coerce a coefficient-like value into a ``(re, im)`` scalar pair."""
    if isinstance(value, Coefficient):
        return _scalar(value.re, mode), _scalar(value.im, mode)
    if isinstance(value, complex):
        return _scalar(value.real, mode), _scalar(value.imag, mode)
    if isinstance(value, tuple) and len(value) == 2:
        return _scalar(value[0], mode), _scalar(value[1], mode)
    return _scalar(value, mode), _scalar(0, mode)


def to_fraction(x) -> Fraction:
    """Exact scalar as a ``Fraction`` with plain ``int`` parts.

    ``Fraction(mpq)`` keeps ``mpz`` numerators, which break comparisons
    and JSON output.
    """
    return Fraction(int(x.numerator), int(x.denominator))


def _fmt_scalar(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Coefficient:
    """A complex scalar stored as its real and imaginary parts."""

    re: object
    im: object = 0

    def __post_init__(self):
        mode = FLOAT if isinstance(self.re, float) or isinstance(self.im, float) else EXACT
        object.__setattr__(self, "re", _scalar(self.re, mode))
        object.__setattr__(self, "im", _scalar(self.im, mode))

    @property
    def mode(self) -> str:
        return FLOAT if isinstance(self.re, float) else EXACT

    @property
    def is_real(self) -> bool:
        if self.mode == EXACT:
            return self.im == 0
        return abs(self.im) <= 1e-10 * max(1.0, abs(self.re))

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def conjugate(self) -> Coefficient:
        return Coefficient(self.re, -self.im)

    def __abs__(self):
        if self.im == 0:
            return abs(self.re)
        return (float(self.re) ** 2 + float(self.im) ** 2) ** 0.5

    def __str__(self) -> str:
        if self.im == 0:
            return _fmt_scalar(self.re)
        return f"({_fmt_scalar(self.re)}, {_fmt_scalar(self.im)})"


@dataclass(frozen=True)
class VariableSpace:
    """Ordered variables with kinds and a conjugation involution.

    ``conjugation[i]`` is the position of the conjugate of variable ``i``;
    real variables are fixed points.  A holomorphic variable without an
    antiholomorphic partner in the space has ``conjugation[i] = None`` and
    series using it cannot be conjugated.
    """

    names: tuple[str, ...]
    kinds: tuple[str, ...]
    conjugation: tuple[int | None, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        names, kinds, conj = tuple(self.names), tuple(self.kinds), tuple(self.conjugation)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "kinds", kinds)
        object.__setattr__(self, "conjugation", conj)
        n = len(names)
        if len(set(names)) != n:
            raise SeriesError(f"duplicate variable names in {names}")
        if len(kinds) != n or len(conj) != n:
            raise SeriesError("names, kinds and conjugation must have equal length")
        for i, (kind, j) in enumerate(zip(kinds, conj)):
            if kind not in (HOLOMORPHIC, ANTIHOLOMORPHIC, REAL):
                raise SeriesError(f"unknown variable kind {kind!r}")
            if j is None:
                if kind == REAL:
                    raise SeriesError(f"real variable {names[i]} must be self-conjugate")
                continue
            if not 0 <= j < n or conj[j] != i:
                raise SeriesError("conjugation must be an involution")
            if kind == REAL and j != i:
                raise SeriesError(f"real variable {names[i]} must be self-conjugate")
            if kind != REAL and kinds[j] == kind:
                raise SeriesError(f"{names[i]} and {names[j]} cannot both be {kind}")
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(names)})

    @classmethod
    def real(cls, names: Iterable[str]) -> VariableSpace:
        names = tuple(names)
        return cls(names, (REAL,) * len(names), tuple(range(len(names))))

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SeriesError(f"unknown variable {name!r} in space {self.names}") from None

    def __contains__(self, name) -> bool:
        return name in self._index

    @property
    def is_real(self) -> bool:
        return all(kind == REAL for kind in self.kinds)

    # packed-key helpers
    def pack(self, exponents: Iterable[int]) -> int:
        exponents = tuple(exponents)
        if len(exponents) != len(self.names):
            raise SeriesError(
                f"multi-index {exponents} has length {len(exponents)}, "
                f"space has {len(self.names)} variables"
            )
        key = 0
        deg = 0
        for e in exponents:
            if e < 0 or e > MAX_ORDER:
                raise SeriesError(f"exponent {e} out of range")
            key = (key << _BITS) | e
            deg += e
        return (deg << (_BITS * len(exponents))) | key

    def unpack(self, key: int) -> tuple[int, ...]:
        out = []
        for _ in range(len(self.names)):
            out.append(key & _MASK)
            key >>= _BITS
        return tuple(reversed(out))

    def degree_limit(self, order: int) -> int:
        """Smallest packed key whose total degree exceeds ``order``."""
        return (order + 1) << (_BITS * len(self.names))

    def key_degree(self, key: int) -> int:
        return key >> (_BITS * len(self.names))


def _paired_space(prefixes: Iterable[tuple[str, int]]) -> VariableSpace:
    names, kinds, conj = [], [], []
    for prefix, count in prefixes:
        base = len(names)
        for j in range(count):
            names.append(f"{prefix}{j + 1}")
            kinds.append(HOLOMORPHIC)
            conj.append(base + count + j)
        for j in range(count):
            names.append(f"~{prefix}{j + 1}")
            kinds.append(ANTIHOLOMORPHIC)
            conj.append(base + j)
    return VariableSpace(tuple(names), tuple(kinds), tuple(conj))


def holomorphic_space(m: int, d: int) -> VariableSpace:
    """The source coordinates ``(z1..zm, w1..wd)`` with no conjugates."""
    names = tuple(f"z{j + 1}" for j in range(m)) + tuple(f"w{j + 1}" for j in range(d))
    return VariableSpace(names, (HOLOMORPHIC,) * len(names), (None,) * len(names))


def complex_space(m: int, d: int) -> VariableSpace:
    """``(z1..zm, ~z1..~zm, w1..wd, ~w1..~wd)``, closed under conjugation."""
    return _paired_space([("z", m), ("w", d)])


def real_space(m: int, d: int) -> VariableSpace:
    """``(x1..xm, y1..ym, u1..ud, v1..vd)``."""
    return VariableSpace.real(
        [f"x{j + 1}" for j in range(m)]
        + [f"y{j + 1}" for j in range(m)]
        + [f"u{j + 1}" for j in range(d)]
        + [f"v{j + 1}" for j in range(d)]
    )


def graph_space(m: int, d: int) -> VariableSpace:
    """``(x1..xm, y1..ym, u1..ud)``: the coordinates of a graph germ."""
    return VariableSpace.real(
        [f"x{j + 1}" for j in range(m)]
        + [f"y{j + 1}" for j in range(m)]
        + [f"u{j + 1}" for j in range(d)]
    )


# ---------------------------------------------------------------------------
# kernel on {packed key: scalar} dictionaries


def _clean(terms: dict) -> dict:
    return {k: v for k, v in terms.items() if v}


def _add_dicts(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    get = out.get
    if sign > 0:
        for k, v in b.items():
            out[k] = get(k, 0) + v
    else:
        for k, v in b.items():
            out[k] = get(k, 0) - v
    return _clean(out)


def _mul_acc(out: dict, outer: dict, inner_sorted: list, limit: int, negate: bool = False):
    # inner_sorted is ascending by key, hence by degree: break once too high
    get = out.get
    if negate:
        for ka, ca in outer.items():
            rem = limit - ka
            for kb, cb in inner_sorted:
                if kb >= rem:
                    break
                key = ka + kb
                out[key] = get(key, 0) - ca * cb
    else:
        for ka, ca in outer.items():
            rem = limit - ka
            for kb, cb in inner_sorted:
                if kb >= rem:
                    break
                key = ka + kb
                out[key] = get(key, 0) + ca * cb


def _integer_form(re: dict, im: dict):
    """Numerators over one common denominator (exact mode)."""
    den = mpz(1)
    for part in (re, im):
        for v in part.values():
            d = v.denominator
            if d != 1 and den % d:
                den = lcm(den, d)
    if den == 1:
        return {k: v.numerator for k, v in re.items()}, {k: v.numerator for k, v in im.items()}, den
    return (
        {k: v.numerator * (den // v.denominator) for k, v in re.items()},
        {k: v.numerator * (den // v.denominator) for k, v in im.items()},
        den,
    )


def _mul_parts(a, b, limit: int):
    """Complex product of two series restricted to packed keys below ``limit``."""
    exact = a.mode == EXACT
    if exact:
        a_re, a_im, a_den = a._integer_parts()
    else:
        a_re, a_im = a._re, a._im
    b_re, b_im, b_den = b._sorted_parts()
    re: dict = {}
    im: dict = {}
    if a_re:
        if b_re:
            _mul_acc(re, a_re, b_re, limit)
        if b_im:
            _mul_acc(im, a_re, b_im, limit)
    if a_im:
        if b_im:
            _mul_acc(re, a_im, b_im, limit, negate=True)
        if b_re:
            _mul_acc(im, a_im, b_re, limit)
    if exact:
        den = a_den * b_den
        if den == 1:
            return {k: mpq(v) for k, v in re.items() if v}, {k: mpq(v) for k, v in im.items() if v}
        return (
            {k: mpq(v, den) for k, v in re.items() if v},
            {k: mpq(v, den) for k, v in im.items() if v},
        )
    return _clean(re), _clean(im)


def _scale(terms: dict, c) -> dict:
    if not c:
        return {}
    return {k: v * c for k, v in terms.items()}


class TruncatedSeries:
    """An immutable truncated power series.

    ``terms`` may map exponent tuples to anything coercible to a
    :class:`Coefficient`: ints, ``Fraction``/``mpq``, strings like ``"3/2"``,
    Python complex numbers, ``(re, im)`` pairs.
    """

    __slots__ = ("space", "order", "mode", "_re", "_im", "_sorted", "_ints", "_hash")

    def __init__(
        self,
        space: VariableSpace,
        order: int,
        terms: Mapping | None = None,
        mode: str = EXACT,
    ):
        if mode not in _MODES:
            raise SeriesError(f"unknown coefficient mode {mode!r}")
        if not 0 <= order <= MAX_ORDER:
            raise SeriesError(f"truncation order {order} out of range")
        re: dict = {}
        im: dict = {}
        limit = space.degree_limit(order)
        for exps, value in (terms or {}).items():
            key = space.pack(exps)
            cre, cim = _split(value, mode)
            if key >= limit:
                continue
            if cre:
                re[key] = re.get(key, 0) + cre
            if cim:
                im[key] = im.get(key, 0) + cim
        self._init(space, order, mode, _clean(re), _clean(im))

    def _init(self, space, order, mode, re, im):
        self.space = space
        self.order = order
        self.mode = mode
        self._re = re
        self._im = im
        self._sorted = None
        self._ints = None
        self._hash = None

    @classmethod
    def _make(cls, space, order, mode, re, im) -> TruncatedSeries:
        s = cls.__new__(cls)
        s._init(space, order, mode, re, im)
        return s

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], Coefficient]:
        """Nonzero terms in graded-lexicographic order."""
        zero = _scalar(0, self.mode)
        keys = set(self._re) | set(self._im)
        items = [(self.space.unpack(k), k) for k in keys]
        items.sort(key=lambda t: (sum(t[0]), tuple(-e for e in t[0])))
        return {
            exps: Coefficient(self._re.get(k, zero), self._im.get(k, zero))
            for exps, k in items
        }

    def coefficient(self, exponents: Iterable[int]) -> Coefficient:
        key = self.space.pack(exponents)
        zero = _scalar(0, self.mode)
        return Coefficient(self._re.get(key, zero), self._im.get(key, zero))

    def __len__(self) -> int:
        return len(set(self._re) | set(self._im))

    def __iter__(self) -> Iterator[tuple[tuple[int, ...], Coefficient]]:
        return iter(self.terms.items())

    def __bool__(self) -> bool:
        return bool(self._re or self._im)

    @property
    def is_zero(self) -> bool:
        return not self

    @property
    def is_real(self) -> bool:
        """All coefficients real (exact: identically zero imaginary parts)."""
        if self.mode == EXACT:
            return not self._im
        return all(
            abs(v) <= 1e-10 * max(1.0, abs(self._re.get(k, 0.0)))
            for k, v in self._im.items()
        )

    def min_degree(self) -> int | None:
        keys = set(self._re) | set(self._im)
        if not keys:
            return None
        return self.space.key_degree(min(keys))

    def degree(self) -> int | None:
        keys = set(self._re) | set(self._im)
        if not keys:
            return None
        return self.space.key_degree(max(keys))

    def constant_term(self) -> Coefficient:
        return self.coefficient((0,) * len(self.space))

    def homogeneous_part(self, lo: int, hi: int | None = None) -> TruncatedSeries:
        """Terms with ``lo <= degree <= hi`` (``hi`` defaults to ``lo``)."""
        hi = lo if hi is None else hi
        deg = self.space.key_degree
        return self._make(
            self.space,
            self.order,
            self.mode,
            {k: v for k, v in self._re.items() if lo <= deg(k) <= hi},
            {k: v for k, v in self._im.items() if lo <= deg(k) <= hi},
        )

    def real_part(self) -> TruncatedSeries:
        """Coefficientwise real part (not the real part as a function)."""
        return self._make(self.space, self.order, self.mode, dict(self._re), {})

    def imag_part(self) -> TruncatedSeries:
        return self._make(self.space, self.order, self.mode, dict(self._im), {})

    def truncate(self, order: int) -> TruncatedSeries:
        """The order-``order`` truncation, ``order <= self.order``."""
        if order > self.order:
            raise SeriesError(
                f"cannot raise truncation order {self.order} to {order}; "
                "use with_order for an explicit re-interpretation"
            )
        limit = self.space.degree_limit(order)
        return self._make(
            self.space,
            order,
            self.mode,
            {k: v for k, v in self._re.items() if k < limit},
            {k: v for k, v in self._im.items() if k < limit},
        )

    def with_order(self, order: int) -> TruncatedSeries:
        """Same terms read at another order; lowering truncates."""
        if order <= self.order:
            return self.truncate(order)
        return self._make(self.space, order, self.mode, dict(self._re), dict(self._im))

    def to_float(self) -> TruncatedSeries:
        if self.mode == FLOAT:
            return self
        return self._make(
            self.space,
            self.order,
            FLOAT,
            {k: float(v) for k, v in self._re.items()},
            {k: float(v) for k, v in self._im.items()},
        )

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: TruncatedSeries):
        if other.space is not self.space and other.space != self.space:
            raise SeriesError(f"space mismatch: {self.space.names} vs {other.space.names}")
        if other.order != self.order:
            raise SeriesError(f"truncation order mismatch: {self.order} vs {other.order}")
        if other.mode != self.mode:
            raise SeriesError(f"coefficient mode mismatch: {self.mode} vs {other.mode}")

    def _coerce(self, other) -> TruncatedSeries | None:
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return other
        try:
            re, im = _split(other, self.mode)
        except SeriesError:
            return None
        return constant(self.space, (re, im), self.order, self.mode)

    def _integer_parts(self):
        if self._ints is None:
            self._ints = _integer_form(self._re, self._im)
        return self._ints

    def _sorted_parts(self):
        if self._sorted is None:
            if self.mode == EXACT:
                re, im, den = self._integer_parts()
            else:
                re, im, den = self._re, self._im, 1
            self._sorted = (sorted(re.items()), sorted(im.items()), den)
        return self._sorted

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._make(
            self.space,
            self.order,
            self.mode,
            _add_dicts(self._re, other._re),
            _add_dicts(self._im, other._im),
        )

    __radd__ = __add__

    def __neg__(self):
        return self._make(
            self.space,
            self.order,
            self.mode,
            {k: -v for k, v in self._re.items()},
            {k: -v for k, v in self._im.items()},
        )

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._make(
            self.space,
            self.order,
            self.mode,
            _add_dicts(self._re, other._re, -1),
            _add_dicts(self._im, other._im, -1),
        )

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> TruncatedSeries:
        """Multiply by a complex scalar."""
        cre, cim = _split(c, self.mode)
        re = _add_dicts(_scale(self._re, cre), _scale(self._im, cim), -1)
        im = _add_dicts(_scale(self._re, cim), _scale(self._im, cre))
        return self._make(self.space, self.order, self.mode, re, im)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            try:
                return self.scale(other)
            except SeriesError:
                return NotImplemented
        return self.mul_truncated(other, self.order)

    def mul_truncated(self, other: TruncatedSeries, order: int) -> TruncatedSeries:
        """Product keeping only degrees ``<= order`` (at most ``self.order``).

        The result keeps the nominal truncation order of the operands.
        """
        self._check(other)
        limit = self.space.degree_limit(min(order, self.order))
        if len(self._re) + len(self._im) <= len(other._re) + len(other._im):
            a, b = self, other
        else:
            a, b = other, self
        re, im = _mul_parts(a, b, limit)
        return self._make(self.space, self.order, self.mode, re, im)

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except SeriesError:
            return NotImplemented

    def __truediv__(self, c):
        if isinstance(c, TruncatedSeries):
            return NotImplemented
        cre, cim = _split(c, self.mode)
        norm = cre * cre + cim * cim
        if not norm:
            raise ZeroDivisionError("division of a series by zero")
        return self.scale((cre / norm, -cim / norm))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise SeriesError("series powers need a non-negative integer exponent")
        result = constant(self.space, 1, self.order, self.mode)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def conjugate(self) -> TruncatedSeries:
        space = self.space
        perm = space.conjugation
        if all(p == i for i, p in enumerate(perm)):
            return self._make(
                space, self.order, self.mode, dict(self._re), {k: -v for k, v in self._im.items()}
            )
        re: dict = {}
        im: dict = {}
        for part, sign, out in ((self._re, 1, re), (self._im, -1, im)):
            for key, v in part.items():
                exps = space.unpack(key)
                new = [0] * len(exps)
                for i, e in enumerate(exps):
                    if e:
                        j = perm[i]
                        if j is None:
                            raise SeriesError(
                                f"variable {space.names[i]} has no conjugate in this space"
                            )
                        new[j] = e
                out[space.pack(new)] = v if sign > 0 else -v
        return self._make(space, self.order, self.mode, re, im)

    # -- comparison and display --------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (
            self.space == other.space
            and self.order == other.order
            and self.mode == other.mode
            and self._re == other._re
            and self._im == other._im
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(
                (self.space.names, self.order, self.mode,
                 frozenset(self._re.items()), frozenset(self._im.items()))
            )
        return self._hash

    def to_text(self) -> str:
        """Canonical text: graded-lex terms, ``p/q`` rationals, ``(re, im)`` complex."""
        pieces = []
        for exps, c in self.terms.items():
            mono = "*".join(
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(self.space.names, exps)
                if e
            )
            if c.im == 0:
                neg = c.re < 0
                mag = -c.re if neg else c.re
                if mono and mag == 1:
                    body = mono
                else:
                    body = _fmt_scalar(mag) + (f"*{mono}" if mono else "")
            else:
                neg = False
                body = str(c) + (f"*{mono}" if mono else "")
            if not pieces:
                pieces.append(("-" if neg else "") + body)
            else:
                pieces.append((" - " if neg else " + ") + body)
        return "".join(pieces) if pieces else "0"

    __str__ = to_text

    def __repr__(self):
        return f"TruncatedSeries({self.to_text()!r}, order={self.order}, space={self.space.names})"


class SeriesVector(tuple):
    """A tuple of series sharing one space, order and mode."""

    def __new__(cls, components: Iterable[TruncatedSeries] = ()):
        comps = tuple(components)
        if not comps:
            raise SeriesError("a SeriesVector needs at least one component")
        first = comps[0]
        for c in comps[1:]:
            first._check(c)
        return super().__new__(cls, comps)

    @property
    def space(self) -> VariableSpace:
        return self[0].space

    @property
    def order(self) -> int:
        return self[0].order

    @property
    def mode(self) -> str:
        return self[0].mode

    @property
    def is_real(self) -> bool:
        return all(c.is_real for c in self)

    def truncate(self, order: int) -> SeriesVector:
        return SeriesVector(c.truncate(order) for c in self)

    def to_float(self) -> SeriesVector:
        return SeriesVector(c.to_float() for c in self)

    def __add__(self, other):
        return SeriesVector(a + b for a, b in zip(self, other, strict=True))

    def __sub__(self, other):
        return SeriesVector(a - b for a, b in zip(self, other, strict=True))

    def __repr__(self):
        return "SeriesVector([" + ", ".join(c.to_text() for c in self) + "])"


# ---------------------------------------------------------------------------
# constructors and module-level operations


def monomial(space: VariableSpace, index: Iterable[int], c=1, k: int = 0, mode: str = EXACT):
    """``c * prod(x_i ** index_i)`` truncated at order ``k``."""
    return TruncatedSeries(space, k, {tuple(index): c}, mode)


def constant(space: VariableSpace, c, k: int, mode: str = EXACT) -> TruncatedSeries:
    re, im = _split(c, mode)
    key = 0
    return TruncatedSeries._make(space, k, mode, {key: re} if re else {}, {key: im} if im else {})


def variable(space: VariableSpace, name: str, k: int, mode: str = EXACT) -> TruncatedSeries:
    exps = [0] * len(space)
    exps[space.index(name)] = 1
    return monomial(space, exps, 1, k, mode)


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    a._check(b)
    return a + b


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    a._check(b)
    return a * b


def conjugate(a: TruncatedSeries) -> TruncatedSeries:
    return a.conjugate()


def _power_cache(base: TruncatedSeries):
    powers = [None, base]

    def power(p: int) -> TruncatedSeries:
        while len(powers) <= p:
            powers.append(powers[-1] * base)
        return powers[p]

    return power


def substitute(
    target: TruncatedSeries,
    bindings: Mapping[str, TruncatedSeries],
    space: VariableSpace | None = None,
    order: int | None = None,
) -> TruncatedSeries:
    """Formal composition ``target(bindings)`` truncated at the output order.

    Bound series must have zero constant term.  Variables of ``target``
    without a binding map to the same-named variable of the output space.
    The output space/order come from the bindings, or from ``space`` and
    ``order`` when there are none.
    """
    bound = dict(bindings)
    ref = None
    for name, s in bound.items():
        target.space.index(name)
        if ref is None:
            ref = s
        else:
            ref._check(s)
        if s._re.get(0) or s._im.get(0):
            raise SeriesError(f"binding for {name} has a nonzero constant term")
    out_space = ref.space if ref is not None else (space or target.space)
    out_order = ref.order if ref is not None else (target.order if order is None else order)
    mode = ref.mode if ref is not None else target.mode
    if space is not None and space != out_space:
        raise SeriesError("explicit output space disagrees with the bindings' space")
    if order is not None and order != out_order:
        raise SeriesError("explicit output order disagrees with the bindings' order")
    if mode != target.mode:
        raise SeriesError(f"coefficient mode mismatch: {target.mode} vs {mode}")

    tspace = target.space
    n_out = len(out_space)
    # identity-mapped variables are relabelled, bound ones go through Horner
    trivial: list[tuple[int, int]] = []
    nontrivial: list[int] = []
    images: list[TruncatedSeries] = []
    for i, name in enumerate(tspace.names):
        if name in bound:
            nontrivial.append(i)
            images.append(bound[name])
        else:
            if name not in out_space:
                raise SeriesError(f"unbound variable {name!r} is not in the output space")
            trivial.append((i, n_out - 1 - out_space.index(name)))

    deg_shift = _BITS * n_out
    limit = out_space.degree_limit(out_order)
    # a bound factor x_i^e contributes degree >= e * (min degree of its image)
    low = [img.min_degree() for img in images]
    low = [out_order + 1 if d is None else d for d in low]
    groups: dict[tuple[int, ...], tuple[dict, dict]] = {}
    for part_index, part in enumerate((target._re, target._im)):
        for key, c in part.items():
            exps = tspace.unpack(key)
            rest = tuple(exps[i] for i in nontrivial)
            tdeg = 0
            okey = 0
            for i, slot in trivial:
                e = exps[i]
                if e:
                    tdeg += e
                    okey |= e << (_BITS * slot)
            if tdeg + sum(e * d for e, d in zip(rest, low)) > out_order:
                continue
            okey |= tdeg << deg_shift
            if okey >= limit:
                continue
            grp = groups.setdefault(rest, ({}, {}))[part_index]
            grp[okey] = grp.get(okey, 0) + c

    leaves = {
        rest: TruncatedSeries._make(out_space, out_order, mode, _clean(re), _clean(im))
        for rest, (re, im) in groups.items()
    }
    if not leaves:
        return TruncatedSeries._make(out_space, out_order, mode, {}, {})
    powers = [_power_cache(img) for img in images]

    def horner(nodes: dict, depth: int, budget: int) -> TruncatedSeries:
        # the caller multiplies the result by factors of degree >= out_order - budget,
        # so only degrees <= budget are needed here
        if depth == len(images):
            (leaf,) = nodes.values()
            return leaf
        split: dict[int, dict] = {}
        for rest, leaf in nodes.items():
            split.setdefault(rest[depth], {})[rest] = leaf
        step = low[depth]
        power = powers[depth]
        acc = None
        prev = 0
        for e in sorted(split, reverse=True):
            need = budget - e * step
            sub = horner(split[e], depth + 1, need)
            if acc is None:
                acc = sub
            else:
                acc = acc.mul_truncated(power(prev - e), need) + sub
            prev = e
        if prev:
            acc = acc.mul_truncated(power(prev), budget)
        return acc

    return horner(leaves, 0, out_order)


def embed(a: TruncatedSeries, space: VariableSpace) -> TruncatedSeries:
    """Re-express ``a`` in a space containing all of its variable names."""
    return substitute(a, {}, space=space, order=a.order)


def _realify_plan(space: VariableSpace, parts: Mapping[str, tuple[str, str]] | None):
    parts = dict(REAL_PARTS if parts is None else parts)
    plan = []
    out_names: list[str] = []
    groups: dict[str, tuple[list[str], list[str]]] = {}
    for i, (name, kind) in enumerate(zip(space.names, space.kinds)):
        if kind == REAL:
            plan.append((name, None))
            continue
        j = space.conjugation[i]
        if j is None:
            raise SeriesError(f"variable {name} has no conjugate partner; cannot realify")
        if kind == ANTIHOLOMORPHIC:
            continue
        prefix = name.rstrip("0123456789")
        suffix = name[len(prefix):]
        if prefix not in parts:
            raise SeriesError(f"no real/imaginary part names known for prefix {prefix!r}")
        re_name, im_name = (p + suffix for p in parts[prefix])
        plan.append((name, (re_name, im_name, space.names[j])))
        bucket = groups.setdefault(prefix, ([], []))
        bucket[0].append(re_name)
        bucket[1].append(im_name)
    for re_names, im_names in groups.values():
        out_names.extend(re_names)
        out_names.extend(im_names)
    out_names.extend(name for name, info in plan if info is None)
    return plan, out_names


@lru_cache(maxsize=None)
def _pair_expansion(a: int, b: int) -> tuple[tuple[int, int, int], ...]:
    """``(x + iy)^a (x - iy)^b`` as ``((q, re, im), ...)`` for ``x^(a+b-q) y^q``."""
    # i^s (-i)^t as (re, im)
    units = ((1, 0), (0, 1), (-1, 0), (0, -1))
    acc: dict[int, list[int]] = {}
    for s in range(a + 1):
        for t in range(b + 1):
            c = comb(a, s) * comb(b, t)
            ur, ui = units[(s - t) % 4]
            slot = acc.setdefault(s + t, [0, 0])
            slot[0] += c * ur
            slot[1] += c * ui
    return tuple((q, re, im) for q, (re, im) in sorted(acc.items()) if re or im)


def realify(
    a: TruncatedSeries,
    out_space: VariableSpace | None = None,
    parts: Mapping[str, tuple[str, str]] | None = None,
) -> TruncatedSeries:
    """Rewrite a series in ``(z, ~z, w, ~w)`` in real coordinates.

    ``z_j = x_j + i y_j`` and ``~z_j = x_j - i y_j`` (likewise ``w = u + i v``).
    The default output space lists the real parts of each holomorphic block
    followed by its imaginary parts, e.g. ``(x1.., y1.., u1.., v1..)``.
    """
    plan, names = _realify_plan(a.space, parts)
    if out_space is None:
        out_space = VariableSpace.real(names)
    space = a.space
    # slot i (holomorphic) becomes the real part, slot j (its conjugate) the imaginary part
    pairs = []
    slot_name = {}
    for name, info in plan:
        i = space.index(name)
        if info is None:
            slot_name[i] = name
            continue
        re_name, im_name, conj_name = info
        j = space.index(conj_name)
        pairs.append((i, j))
        slot_name[i] = re_name
        slot_name[j] = im_name
    zero = _scalar(0, a.mode)
    terms: dict[tuple[int, ...], list] = {}
    for key in set(a._re) | set(a._im):
        terms[space.unpack(key)] = [a._re.get(key, zero), a._im.get(key, zero)]
    for i, j in pairs:
        new: dict[tuple[int, ...], list] = {}
        for exps, (cr, ci) in terms.items():
            p, q0 = exps[i], exps[j]
            if not p and not q0:
                slot = new.setdefault(exps, [zero, zero])
                slot[0] += cr
                slot[1] += ci
                continue
            ex = list(exps)
            for q, tr, ti in _pair_expansion(p, q0):
                ex[i] = p + q0 - q
                ex[j] = q
                slot = new.setdefault(tuple(ex), [zero, zero])
                slot[0] += cr * tr - ci * ti
                slot[1] += cr * ti + ci * tr
        terms = new
    positions = [out_space.index(slot_name[i]) for i in range(len(space))]
    n_out = len(out_space)
    re: dict = {}
    im: dict = {}
    for exps, (cr, ci) in terms.items():
        out = [0] * n_out
        for i, e in enumerate(exps):
            if e:
                out[positions[i]] = e
        key = out_space.pack(out)
        if cr:
            re[key] = cr
        if ci:
            im[key] = ci
    return TruncatedSeries._make(out_space, a.order, a.mode, re, im)


def weighted_norm(r, t):
    """``sum |c_a| t^|a|`` over the stored terms of a real series vector.

    For a vector, ``|c_a|`` is the max over components at each multi-index.
    """
    comps = [r] if isinstance(r, TruncatedSeries) else list(r)
    mode = comps[0].mode
    t = _scalar(t, mode)
    if t <= 0:
        raise SeriesError("weighted_norm needs t > 0")
    best: dict[int, object] = {}
    for comp in comps:
        if not comp.space.is_real:
            raise SeriesError("weighted_norm is defined on series in real variables")
        if not comp.is_real:
            raise SeriesError("weighted_norm needs real coefficients")
        for key, v in comp._re.items():
            mag = abs(v)
            if key not in best or mag > best[key]:
                best[key] = mag
    space = comps[0].space
    total = _scalar(0, mode)
    for key, mag in best.items():
        total += mag * t ** space.key_degree(key)
    return total
