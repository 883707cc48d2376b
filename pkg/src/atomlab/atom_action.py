"""Atoms, truncated product-group elements, and the action on HF objects.

An atom is a pair (a, w): a residue tagged by a finitely supported
vector.  A group element assigns a residue to every coordinate below a
finite horizon and acts by (a, w) -> (a + sum_i w_i * g_i, w), so the
vector component never moves and the cells U_w = {(a, w) : a} are
permuted within themselves.  The action extends to hereditarily finite
objects (atoms, finite sets, tuples) leafwise.

Subgroups of the horizon group are elementary abelian, hence subspaces
of the coordinate space; they are carried around as ``GroupSubspace``
so that index computations are rank computations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import InternalConsistencyError, ResourceError, UsageError
from .fp_core import (
    DEFAULT_ENUM_CAP,
    FpScalar,
    Subspace,
    Vector,
    check_prime,
    span_of,
    unit,
)


@dataclass(frozen=True)
class Atom:
    """An element (a, w) of the atom space F_p x W."""

    a: FpScalar
    w: Vector

    def __post_init__(self):
        if self.a.p != self.w.p:
            raise UsageError(f"mixed moduli {self.a.p} and {self.w.p}")

    @property
    def p(self) -> int:
        return self.w.p

    def to_text(self, zero: str = "") -> str:
        return f"({self.a.value}|{self.w.to_text(zero=zero)})"

    @classmethod
    def from_text(cls, text: str, p: int) -> "Atom":
        text = text.strip()
        if not (text.startswith("(") and text.endswith(")")) or "|" not in text:
            raise UsageError(f"bad atom text {text!r}, expected '(a|w)'")
        a_s, w_s = text[1:-1].split("|", 1)
        try:
            a = int(a_s)
        except ValueError:
            raise UsageError(f"bad atom residue {a_s!r}") from None
        return cls(FpScalar(a, p), Vector.from_text(w_s, p))

    def __repr__(self):
        return self.to_text(zero="∅")


def atom(a: int, w: Vector) -> Atom:
    """Shorthand constructor taking a plain residue."""
    return Atom(FpScalar(a, w.p), w)


@dataclass(frozen=True)
class GroupElement:
    """A residue assignment to every coordinate below the horizon (dense)."""

    p: int
    coords: tuple[int, ...]

    def __post_init__(self):
        check_prime(self.p)
        if any(not 0 <= c < self.p for c in self.coords):
            raise UsageError("group element coordinates must be residues mod p")

    @property
    def horizon(self) -> int:
        return len(self.coords)

    @property
    def is_identity(self) -> bool:
        return not any(self.coords)

    @classmethod
    def identity(cls, p: int, horizon: int) -> "GroupElement":
        return cls(p, (0,) * horizon)

    @classmethod
    def delta(cls, p: int, horizon: int, i: int, value: int = 1) -> "GroupElement":
        """The element supported at the single coordinate ``i``."""
        if not 0 <= i < horizon:
            raise UsageError(f"coordinate {i} outside horizon {horizon}")
        coords = [0] * horizon
        coords[i] = value % p
        return cls(p, tuple(coords))

    def as_vector(self) -> Vector:
        return Vector(self.p, tuple((i, c) for i, c in enumerate(self.coords) if c))

    @classmethod
    def from_vector(cls, v: Vector, horizon: int) -> "GroupElement":
        if v.max_index >= horizon:
            raise UsageError(
                f"vector supported at {v.max_index} exceeds horizon {horizon}"
            )
        coords = [0] * horizon
        for i, c in v.entries:
            coords[i] = c
        return cls(v.p, tuple(coords))

    def to_text(self) -> str:
        return ",".join(str(c) for c in self.coords)

    @classmethod
    def from_text(cls, text: str, p: int) -> "GroupElement":
        text = text.strip()
        if not text:
            raise UsageError("empty group element text")
        try:
            coords = tuple(int(c) % p for c in text.split(","))
        except ValueError:
            raise UsageError(f"bad group element text {text!r}") from None
        return cls(p, coords)

    def __repr__(self):
        return self.to_text()


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """Coordinatewise sum; the action of the result equals acting by g then h."""
    if g.p != h.p:
        raise UsageError(f"mixed moduli {g.p} and {h.p}")
    if g.horizon != h.horizon:
        raise UsageError(f"mixed horizons {g.horizon} and {h.horizon}")
    return GroupElement(g.p, tuple((a + b) % g.p for a, b in zip(g.coords, h.coords)))


def act_atom(x: Atom, g: GroupElement) -> Atom:
    """(a, w) -> (a + sum_i w_i * g_i, w).  Support beyond the horizon is an error."""
    if g.p != x.p:
        raise UsageError(f"mixed moduli {x.p} and {g.p}")
    s = x.w.dot_dense(g.coords)
    if s == 0:
        return x
    return Atom(FpScalar(x.a.value + s, x.p), x.w)


def fixes_at(g: GroupElement, vectors: Iterable[Vector]) -> bool:
    """True iff g fixes every atom of every cell U_w, w in the given set."""
    return all(w.dot_dense(g.coords) == 0 for w in vectors)


@dataclass(frozen=True)
class GroupSubspace:
    """A subgroup of the horizon group, stored as a coordinate subspace."""

    horizon: int
    space: Subspace

    def __post_init__(self):
        if self.space.max_index() >= self.horizon:
            raise UsageError("subgroup basis exceeds its own horizon")

    @property
    def p(self) -> int:
        return self.space.p

    @property
    def dimension(self) -> int:
        return self.space.dimension

    @property
    def size(self) -> int:
        return self.space.size

    @classmethod
    def full(cls, p: int, horizon: int) -> "GroupSubspace":
        return cls(horizon, span_of((Vector(p, ((i, 1),)) for i in range(horizon)), p))

    @classmethod
    def trivial(cls, p: int, horizon: int) -> "GroupSubspace":
        return cls(horizon, Subspace(p))

    def contains(self, g: GroupElement) -> bool:
        return self.space.contains(g.as_vector())

    def basis_elements(self) -> tuple[GroupElement, ...]:
        return tuple(
            GroupElement.from_vector(b, self.horizon) for b in self.space.basis
        )

    def elements(self, cap: int = DEFAULT_ENUM_CAP) -> Iterator[GroupElement]:
        """All members in basis-combination order (identity first)."""
        for v in self.space.enumerate_elements(cap):
            yield GroupElement.from_vector(v, self.horizon)

    def index_over(self, sub: "GroupSubspace") -> int:
        """[self : sub]; requires sub to actually be contained in self."""
        if sub.horizon != self.horizon or sub.p != self.p:
            raise UsageError("subgroup index across different groups")
        if not self.space.contains_subspace(sub.space):
            raise UsageError("index requested over a non-subgroup")
        return self.p ** (self.dimension - sub.dimension)


def pointwise_stabilizer(
    vectors: Iterable[Vector], horizon: int, p: int | None = None
) -> GroupSubspace:
    """The subgroup fixing every atom over every given vector.

    Fixing at w is the linear condition sum_i w_i g_i = 0, so this is the
    annihilator of the span of the vectors inside the horizon group.
    """
    vectors = tuple(vectors)
    for w in vectors:
        if p is None:
            p = w.p
        if w.max_index >= horizon:
            raise UsageError(
                f"vector supported at {w.max_index} exceeds horizon {horizon}"
            )
    if p is None:
        raise UsageError("pointwise stabilizer of an empty set needs an explicit p")
    rows = span_of(vectors, p)
    pivots = rows.pivots
    free = [i for i in range(horizon) if i not in pivots]
    kernel = []
    for f in free:
        entries = {f: 1}
        for b in rows.basis:
            c = b.coeff(f)
            if c:
                entries[b.lead_index] = -c % p
        kernel.append(Vector.from_dict(p, entries))
    return GroupSubspace(horizon, span_of(kernel, p))


# ---------------------------------------------------------------------------
# Hereditarily finite objects over atoms
# ---------------------------------------------------------------------------


class HFObject:
    """Base class: an atom leaf, a canonical finite set, or a tuple."""

    __slots__ = ()


class AtomLeaf(HFObject):
    __slots__ = ("atom", "_hash")

    def __init__(self, a: Atom):
        if not isinstance(a, Atom):
            raise UsageError(f"AtomLeaf wraps an Atom, got {type(a).__name__}")
        object.__setattr__(self, "atom", a)
        object.__setattr__(self, "_hash", hash((0, a)))

    def __setattr__(self, *_):
        raise AttributeError("AtomLeaf is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, AtomLeaf)
            and self._hash == other._hash
            and self.atom == other.atom
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return repr(self.atom)


class FiniteSet(HFObject):
    """Duplicate-free, order-insensitive collection of HF objects."""

    __slots__ = ("members", "_hash")

    def __init__(self, members: Iterable[HFObject] = ()):
        ms = frozenset(members)
        for m in ms:
            if not isinstance(m, HFObject):
                raise UsageError(f"set member must be HFObject, got {type(m).__name__}")
        object.__setattr__(self, "members", ms)
        object.__setattr__(self, "_hash", hash((1, ms)))

    def __setattr__(self, *_):
        raise AttributeError("FiniteSet is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, FiniteSet)
            and self._hash == other._hash
            and self.members == other.members
        )

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, item):
        return item in self.members

    def sorted_members(self) -> list[HFObject]:
        return sorted(self.members, key=sort_key)

    def __repr__(self):
        return "{" + ", ".join(repr(m) for m in self.sorted_members()) + "}"


class HFTuple(HFObject):
    """Ordered tuple of HF objects; equality is positional."""

    __slots__ = ("items", "_hash")

    def __init__(self, items: Iterable[HFObject]):
        it = tuple(items)
        for m in it:
            if not isinstance(m, HFObject):
                raise UsageError(
                    f"tuple item must be HFObject, got {type(m).__name__}"
                )
        object.__setattr__(self, "items", it)
        object.__setattr__(self, "_hash", hash((2, it)))

    def __setattr__(self, *_):
        raise AttributeError("HFTuple is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, HFTuple)
            and self._hash == other._hash
            and self.items == other.items
        )

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __repr__(self):
        return "(" + ", ".join(repr(m) for m in self.items) + ")"


def leaf(a: int, w: Vector) -> AtomLeaf:
    return AtomLeaf(atom(a, w))


def pair(x: HFObject, y: HFObject) -> HFTuple:
    return HFTuple((x, y))


def sort_key(x: HFObject):
    """Total-order key used for canonical serialization of sets."""
    if isinstance(x, AtomLeaf):
        return (0, x.atom.a.value, x.atom.w.sort_key())
    if isinstance(x, FiniteSet):
        return (1, len(x.members), tuple(sorted(sort_key(m) for m in x.members)))
    if isinstance(x, HFTuple):
        return (2, len(x.items), tuple(sort_key(m) for m in x.items))
    raise UsageError(f"not an HFObject: {type(x).__name__}")


def atoms_of(x: HFObject) -> Iterator[Atom]:
    if isinstance(x, AtomLeaf):
        yield x.atom
    elif isinstance(x, FiniteSet):
        for m in x.members:
            yield from atoms_of(m)
    elif isinstance(x, HFTuple):
        for m in x.items:
            yield from atoms_of(m)
    else:
        raise UsageError(f"not an HFObject: {type(x).__name__}")


def hf_max_index(x: HFObject) -> int:
    return max((a.w.max_index for a in atoms_of(x)), default=-1)


def hf_prime(x: HFObject) -> int | None:
    for a in atoms_of(x):
        return a.p
    return None


def act_hf(x: HFObject, g: GroupElement) -> HFObject:
    """Apply the action to every atom leaf, re-canonicalizing sets."""
    if isinstance(x, AtomLeaf):
        return AtomLeaf(act_atom(x.atom, g))
    if isinstance(x, FiniteSet):
        return FiniteSet(act_hf(m, g) for m in x.members)
    if isinstance(x, HFTuple):
        return HFTuple(act_hf(m, g) for m in x.items)
    raise UsageError(f"not an HFObject: {type(x).__name__}")


def orbit(
    x: HFObject, subgroup: GroupSubspace, cap: int = DEFAULT_ENUM_CAP
) -> frozenset[HFObject]:
    """{x.g : g in the subgroup}, by enumerating the subgroup."""
    if subgroup.size > cap:
        raise ResourceError(f"orbit enumeration over {subgroup.size} elements, cap {cap}")
    return frozenset(act_hf(x, g) for g in subgroup.elements(cap))


def stabilizer_in(
    x: HFObject, subgroup: GroupSubspace, cap: int = DEFAULT_ENUM_CAP
) -> GroupSubspace:
    """{g in subgroup : x.g = x}, returned as a coordinate subspace."""
    if subgroup.size > cap:
        raise ResourceError(
            f"stabilizer enumeration over {subgroup.size} elements, cap {cap}"
        )
    fixers = [g for g in subgroup.elements(cap) if act_hf(x, g) == x]
    space = span_of((g.as_vector() for g in fixers), subgroup.p)
    # fixing is preserved under composition, so the fixers must form a subspace
    if subgroup.p**space.dimension != len(fixers):
        raise InternalConsistencyError(
            "stabilizer is not closed under composition; action is inconsistent"
        )
    return GroupSubspace(subgroup.horizon, space)


# ---------------------------------------------------------------------------
# Partition cells
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionCell:
    """The p atoms sharing the vector component w."""

    w: Vector

    @property
    def p(self) -> int:
        return self.w.p

    def members(self) -> tuple[Atom, ...]:
        return tuple(atom(a, self.w) for a in range(self.p))

    def as_hf(self) -> FiniteSet:
        return FiniteSet(AtomLeaf(a) for a in self.members())


def partition_at_horizon(p: int, horizon: int, cap: int = DEFAULT_ENUM_CAP) -> FiniteSet:
    """The set of all cells U_w for w supported below the horizon."""
    space = span_of((unit(p, i) for i in range(horizon)), p)
    return FiniteSet(PartitionCell(w).as_hf() for w in space.enumerate_elements(cap))


# ---------------------------------------------------------------------------
# Kuratowski pair encoding (for equivariance cross-checks)
# ---------------------------------------------------------------------------


def to_kuratowski(t: HFTuple) -> FiniteSet:
    """Encode a 2-tuple (x, y) as the pure set {{x}, {x, y}}."""
    if not isinstance(t, HFTuple) or len(t) != 2:
        raise UsageError("Kuratowski encoding is defined for 2-tuples")
    x, y = t.items
    return FiniteSet((FiniteSet((x,)), FiniteSet((x, y))))


def from_kuratowski(s: FiniteSet) -> HFTuple:
    """Decode {{x}, {x, y}} (or {{x}} when x = y) back to the 2-tuple."""
    if not isinstance(s, FiniteSet):
        raise UsageError("Kuratowski decoding expects a FiniteSet")
    ms = list(s.members)
    if not all(isinstance(m, FiniteSet) for m in ms):
        raise UsageError("not a Kuratowski pair: members are not sets")
    if len(ms) == 1 and len(ms[0]) == 1:
        (x,) = ms[0].members
        return HFTuple((x, x))
    if len(ms) == 2:
        ms.sort(key=len)
        if len(ms[0]) == 1 and len(ms[1]) == 2:
            (x,) = ms[0].members
            rest = [m for m in ms[1].members if m != x]
            if len(rest) == 1 and x in ms[1]:
                return HFTuple((x, rest[0]))
    raise UsageError("not a Kuratowski pair")


# ---------------------------------------------------------------------------
# JSON forms
# ---------------------------------------------------------------------------


def hf_to_json(x: HFObject):
    """JSON-ready form: {"atom": "(a|w)"} | {"set": [...]} | {"tuple": [...]}.

    Sets are listed in canonical sorted order so serialization is stable.
    """
    if isinstance(x, AtomLeaf):
        return {"atom": x.atom.to_text()}
    if isinstance(x, FiniteSet):
        return {"set": [hf_to_json(m) for m in x.sorted_members()]}
    if isinstance(x, HFTuple):
        return {"tuple": [hf_to_json(m) for m in x.items]}
    raise UsageError(f"not an HFObject: {type(x).__name__}")


def hf_from_json(obj, p: int) -> HFObject:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise UsageError(f"bad HF JSON node: {obj!r}")
    if "atom" in obj:
        return AtomLeaf(Atom.from_text(obj["atom"], p))
    if "set" in obj:
        return FiniteSet(hf_from_json(m, p) for m in obj["set"])
    if "tuple" in obj:
        return HFTuple(hf_from_json(m, p) for m in obj["tuple"])
    raise UsageError(f"bad HF JSON node: {obj!r}")
