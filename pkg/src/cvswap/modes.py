"""Heisenberg-picture bookkeeping of quadrature operators.

Every quadrature is kept as an exact linear combination of

* vacuum basis quadratures (independent, variance 1/4 each),
* homodyne outcome symbols (classical results, resolved later),
* input symbols (the unknown coherent amplitude of an input mode),
* a constant.

Measurements record a symbol whose meaning is the measured operator plus
detector noise; :meth:`ModeRegister.resolve` substitutes the definitions
back so statistics can be read off the vacuum coefficients.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

VACUUM_VARIANCE = 0.25
ZERO_TOL = 1e-15
COMPARE_ATOL = 1e-12


class QuadKind(enum.Enum):
    X = "x"
    P = "p"

    @property
    def conjugate(self) -> "QuadKind":
        return QuadKind.P if self is QuadKind.X else QuadKind.X


class ModeAlgebraError(ValueError):
    """Base class for misuse of the mode algebra."""


class DeadModeError(ModeAlgebraError):
    pass


class KindMismatchError(ModeAlgebraError):
    pass


class UnknownOutcomeError(ModeAlgebraError, KeyError):
    pass


def _clean(terms: Mapping[int, float]) -> Dict[int, float]:
    return {k: float(v) for k, v in terms.items() if abs(v) > ZERO_TOL}


def _merge(a: Mapping[int, float], b: Mapping[int, float], sb: float = 1.0) -> Dict[int, float]:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0.0) + sb * v
    return _clean(out)


@dataclass(frozen=True)
class QuadExpr:
    """Linear combination of basis quadratures, outcome and input symbols.

    Instances are immutable and kept in canonical form: coefficients with
    magnitude below ``ZERO_TOL`` are dropped on construction.
    """

    kind: QuadKind
    vacuum: Mapping[int, float] = field(default_factory=dict)
    outcomes: Mapping[int, float] = field(default_factory=dict)
    inputs: Mapping[int, float] = field(default_factory=dict)
    constant: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "vacuum", _clean(self.vacuum))
        object.__setattr__(self, "outcomes", _clean(self.outcomes))
        object.__setattr__(self, "inputs", _clean(self.inputs))
        c = float(self.constant)
        object.__setattr__(self, "constant", 0.0 if abs(c) <= ZERO_TOL else c)

    @classmethod
    def zero(cls, kind: QuadKind) -> "QuadExpr":
        return cls(kind)

    def _check_kind(self, other: "QuadExpr") -> None:
        if other.kind is not self.kind:
            raise KindMismatchError(
                f"cannot combine {self.kind.value}- and {other.kind.value}-quadratures"
            )

    def __add__(self, other: "QuadExpr") -> "QuadExpr":
        if not isinstance(other, QuadExpr):
            return NotImplemented
        self._check_kind(other)
        return QuadExpr(
            self.kind,
            _merge(self.vacuum, other.vacuum),
            _merge(self.outcomes, other.outcomes),
            _merge(self.inputs, other.inputs),
            self.constant + other.constant,
        )

    def __sub__(self, other: "QuadExpr") -> "QuadExpr":
        if not isinstance(other, QuadExpr):
            return NotImplemented
        return self + (-other)

    def __mul__(self, k: float) -> "QuadExpr":
        if isinstance(k, QuadExpr):
            return NotImplemented
        k = float(k)
        return QuadExpr(
            self.kind,
            {i: k * c for i, c in self.vacuum.items()},
            {i: k * c for i, c in self.outcomes.items()},
            {i: k * c for i, c in self.inputs.items()},
            k * self.constant,
        )

    __rmul__ = __mul__

    def __truediv__(self, k: float) -> "QuadExpr":
        return self * (1.0 / k)

    def __neg__(self) -> "QuadExpr":
        return self * -1.0

    @property
    def is_resolved(self) -> bool:
        return not self.outcomes

    def noise_part(self) -> "QuadExpr":
        """The expression with input symbols and constant removed."""
        return QuadExpr(self.kind, self.vacuum, self.outcomes)

    def allclose(self, other: "QuadExpr", atol: float = COMPARE_ATOL) -> bool:
        if other.kind is not self.kind:
            return False
        for mine, theirs in (
            (self.vacuum, other.vacuum),
            (self.outcomes, other.outcomes),
            (self.inputs, other.inputs),
        ):
            for k in set(mine) | set(theirs):
                if abs(mine.get(k, 0.0) - theirs.get(k, 0.0)) > atol:
                    return False
        return abs(self.constant - other.constant) <= atol


@dataclass
class Mode:
    x: QuadExpr
    p: QuadExpr
    label: str
    alive: bool = True

    def quad(self, kind: QuadKind) -> QuadExpr:
        return self.x if kind is QuadKind.X else self.p


@dataclass(frozen=True)
class OutcomeRecord:
    id: int
    kind: QuadKind
    defining_expr: QuadExpr
    label: str


@dataclass(frozen=True)
class InputSymbol:
    id: int
    kind: QuadKind
    label: str


@dataclass(frozen=True)
class BasisEntry:
    index: int
    kind: QuadKind
    label: str
    # entries of opposite kind sharing an origin form a canonical x/p pair
    origin: str


class ModeRegister:
    """The live optical modes plus the ledgers they refer to.

    A register is owned by a single caller; it is not safe to mutate from
    several threads. Parameter sweeps should build one register per point.
    """

    def __init__(self) -> None:
        self.modes: List[Mode] = []
        self.outcomes: List[OutcomeRecord] = []
        self.inputs: List[InputSymbol] = []
        self.basis: Dict[QuadKind, List[BasisEntry]] = {QuadKind.X: [], QuadKind.P: []}
        self._input_of: Dict[int, Tuple[int, int]] = {}

    # -- ledgers -------------------------------------------------------

    def basis_count(self, kind: QuadKind) -> int:
        return len(self.basis[kind])

    def _new_basis(self, kind: QuadKind, label: str, origin: str) -> QuadExpr:
        idx = len(self.basis[kind])
        self.basis[kind].append(BasisEntry(idx, kind, label, origin))
        return QuadExpr(kind, {idx: 1.0})

    def _new_input(self, kind: QuadKind, label: str) -> Tuple[int, QuadExpr]:
        sid = len(self.inputs)
        self.inputs.append(InputSymbol(sid, kind, label))
        return sid, QuadExpr(kind, inputs={sid: 1.0})

    def mode(self, m: int) -> Mode:
        try:
            return self.modes[m]
        except (IndexError, TypeError):
            raise ModeAlgebraError(f"no mode with id {m!r}") from None

    def _live(self, m: int) -> Mode:
        mode = self.mode(m)
        if not mode.alive:
            raise DeadModeError(f"mode {mode.label!r} was consumed by a measurement")
        return mode

    def _check(self, expr: QuadExpr, kind: QuadKind) -> None:
        assert expr.kind is kind
        n = len(self.basis[kind])
        assert all(0 <= i < n for i in expr.vacuum), "vacuum index outside the ledger"
        assert all(self.outcomes[i].kind is kind for i in expr.outcomes)
        assert all(self.inputs[i].kind is kind for i in expr.inputs)

    def _set(self, m: int, x: QuadExpr, p: QuadExpr) -> None:
        self._check(x, QuadKind.X)
        self._check(p, QuadKind.P)
        mode = self.modes[m]
        mode.x, mode.p = x, p

    def live_modes(self) -> Iterator[int]:
        return (i for i, m in enumerate(self.modes) if m.alive)

    # -- mode creation -------------------------------------------------

    def add_vacuum_mode(self, label: Optional[str] = None) -> int:
        m = len(self.modes)
        label = str(m) if label is None else label
        origin = f"mode:{m}"
        x = self._new_basis(QuadKind.X, label, origin)
        p = self._new_basis(QuadKind.P, label, origin)
        self.modes.append(Mode(x, p, label))
        return m

    def add_input_mode(self, label: str = "in") -> int:
        """Coherent input: unknown classical amplitude plus vacuum noise."""
        m = self.add_vacuum_mode(label)
        ix, sx = self._new_input(QuadKind.X, label)
        ip, sp = self._new_input(QuadKind.P, label)
        self._input_of[m] = (ix, ip)
        mode = self.modes[m]
        self._set(m, mode.x + sx, mode.p + sp)
        return m

    def input_ids(self, m: int) -> Tuple[int, int]:
        """Input-symbol ids (x, p) carried by an input mode."""
        if m not in self._input_of:
            raise ModeAlgebraError(f"mode {self.mode(m).label!r} is not an input mode")
        return self._input_of[m]

    # -- Gaussian unitaries ---------------------------------------------

    def squeeze(self, m: int, r: float) -> None:
        """x -> e^{+r} x, p -> e^{-r} p."""
        mode = self._live(m)
        self._set(m, mode.x * math.exp(r), mode.p * math.exp(-r))

    def beamsplitter(self, a: int, b: int) -> None:
        """Balanced beamsplitter: a -> (a+b)/sqrt2, b -> (a-b)/sqrt2.

        Involutive, so applying it twice restores both modes.
        """
        if a == b:
            raise ModeAlgebraError("beamsplitter needs two distinct modes")
        ma, mb = self._live(a), self._live(b)
        s = 1.0 / math.sqrt(2.0)
        xa, xb, pa, pb = ma.x, mb.x, ma.p, mb.p
        self._set(a, (xa + xb) * s, (pa + pb) * s)
        self._set(b, (xa - xb) * s, (pa - pb) * s)

    # -- measurement and feed-forward ------------------------------------

    def homodyne(
        self, m: int, kind: QuadKind, eta: float = 1.0, label: Optional[str] = None
    ) -> int:
        """Measure one quadrature of mode ``m`` with amplitude efficiency ``eta``.

        The record stores the measured operator plus
        ``sqrt(eta**-2 - 1)`` times a fresh vacuum quadrature. The mode is
        consumed, conjugate quadrature included.
        """
        if not (0.0 < eta <= 1.0) or math.isnan(eta):
            raise ModeAlgebraError(f"detector efficiency must lie in (0, 1], got {eta!r}")
        mode = self._live(m)
        oid = len(self.outcomes)
        label = f"{kind.value}_m{oid}" if label is None else label
        defining = self.resolve(mode.quad(kind))
        noise_amp = math.sqrt(1.0 / eta**2 - 1.0)
        if noise_amp > 0.0:
            defining = defining + noise_amp * self._new_basis(kind, f"det_{label}", f"noise:{oid}")
        self.outcomes.append(OutcomeRecord(oid, kind, defining, label))
        mode.alive = False
        return oid

    def outcome(self, oid: int) -> OutcomeRecord:
        if not isinstance(oid, int) or not 0 <= oid < len(self.outcomes):
            raise UnknownOutcomeError(f"no outcome with id {oid!r}")
        return self.outcomes[oid]

    def displace(self, m: int, kind: QuadKind, oid: int, gain: float) -> None:
        """Add ``gain`` times a recorded outcome to one quadrature of ``m``."""
        mode = self._live(m)
        rec = self.outcome(oid)
        if rec.kind is not kind:
            raise KindMismatchError(
                f"outcome {rec.label!r} is a {rec.kind.value}-result, cannot displace {kind.value}"
            )
        shift = QuadExpr(kind, outcomes={oid: gain})
        if kind is QuadKind.X:
            self._set(m, mode.x + shift, mode.p)
        else:
            self._set(m, mode.x, mode.p + shift)

    # -- statistics ------------------------------------------------------

    def resolve(self, expr: QuadExpr) -> QuadExpr:
        """Substitute every outcome symbol by its defining expression."""
        if expr.is_resolved:
            return expr
        out = QuadExpr(expr.kind, expr.vacuum, {}, expr.inputs, expr.constant)
        for oid, c in expr.outcomes.items():
            out = out + c * self.outcome(oid).defining_expr
        return out

    def covariance(self, e1: QuadExpr, e2: QuadExpr) -> float:
        """Symmetrised covariance; input symbols are classical and do not fluctuate."""
        if e1.kind is not e2.kind:
            # x and p ledgers are disjoint vacua
            return 0.0
        v1 = self.resolve(e1).vacuum
        v2 = self.resolve(e2).vacuum
        return VACUUM_VARIANCE * sum(c * v2[i] for i, c in v1.items() if i in v2)

    def variance(self, expr: QuadExpr) -> float:
        v = self.resolve(expr).vacuum
        return VACUUM_VARIANCE * sum(c * c for c in v.values())

    def commutator(self, ex: QuadExpr, ep: QuadExpr) -> float:
        """[ex, ep] in units of the vacuum commutator [x0, p0].

        Pairs each X basis entry with the P entry of the same origin, so
        a mode evolved by squeezers and beamsplitters alone gives 1.
        """
        if ex.kind is not QuadKind.X or ep.kind is not QuadKind.P:
            raise KindMismatchError("commutator expects an x- then a p-expression")
        ex, ep = self.resolve(ex), self.resolve(ep)
        p_by_origin = {
            self.basis[QuadKind.P][i].origin: c for i, c in ep.vacuum.items()
        }
        return sum(
            c * p_by_origin.get(self.basis[QuadKind.X][i].origin, 0.0)
            for i, c in ex.vacuum.items()
        )

    def labelled(self, expr: QuadExpr) -> Dict[str, float]:
        """Coefficients keyed by printable term names (resolved form)."""
        e = self.resolve(expr)
        k = e.kind.value
        out = {f"{k}0_{self.basis[e.kind][i].label}": c for i, c in e.vacuum.items()}
        out.update({f"{k}_{self.inputs[i].label}": c for i, c in e.inputs.items()})
        if e.constant:
            out["1"] = e.constant
        return out

    def format(self, expr: QuadExpr, digits: int = 12) -> str:
        """Deterministic text form; terms ordered vacuum, outcomes, inputs, constant."""
        k = expr.kind.value
        terms = [(c, f"{k}0_{self.basis[expr.kind][i].label}") for i, c in sorted(expr.vacuum.items())]
        terms += [(c, self.outcomes[i].label) for i, c in sorted(expr.outcomes.items())]
        terms += [(c, f"{k}_{self.inputs[i].label}") for i, c in sorted(expr.inputs.items())]
        if expr.constant:
            terms.append((expr.constant, ""))
        if not terms:
            return "0"
        parts = []
        for c, name in terms:
            num = f"{c:+.{digits}g}"
            parts.append(f"{num}*{name}" if name else num)
        return " ".join(parts)


def new_register() -> ModeRegister:
    return ModeRegister()
