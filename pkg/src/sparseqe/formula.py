"""Prenex existential formulas over a conjunction of atoms."""

from __future__ import annotations

from .atoms import LinearAtom, atom_vars
from .poly import PolyAtom
from .errors import MixedMode


class QuantFormula:
    """``exists q1..qm . atom_1 and ... and atom_s``.

    Atoms are all linear (LRA mode) or all polynomial (NRA mode); they are
    kept canonical and duplicate-free, in first-appearance order.  Free
    variables are derived.  ``is_false`` marks a conjunction that collapsed
    because an input atom was trivially false.  Instances are immutable.
    """

    __slots__ = ("quantified", "atoms", "free", "linear", "is_false")

    def __init__(self, quantified, atoms, is_false=False):
        quantified = tuple(quantified)
        seen = set()
        unique = []
        for a in atoms:
            if a not in seen:
                seen.add(a)
                unique.append(a)
        atoms = tuple(unique)

        kinds = {type(a) for a in atoms}
        if kinds - {LinearAtom, PolyAtom}:
            raise TypeError(f"unsupported atom types: {kinds}")
        if len(kinds) == 2:
            raise MixedMode("formula mixes linear and polynomial atoms")
        linear = kinds != {PolyAtom}

        qset = set(quantified)
        if len(qset) != len(quantified):
            raise ValueError("duplicate quantified variable")
        occurring = set()
        for a in atoms:
            occurring |= atom_vars(a)
        free = tuple(sorted(occurring - qset))

        self.quantified = quantified
        self.atoms = atoms
        self.free = free
        self.linear = linear
        self.is_false = bool(is_false)

    def quantified_set(self):
        return frozenset(self.quantified)

    def all_vars(self):
        return tuple(self.quantified) + tuple(self.free)

    def quantified_vars_of(self, atom):
        return atom_vars(atom) & self.quantified_set()

    def __eq__(self, other):
        return (isinstance(other, QuantFormula)
                and self.quantified == other.quantified
                and self.atoms == other.atoms
                and self.is_false == other.is_false)

    def __hash__(self):
        return hash((self.quantified, self.atoms, self.is_false))

    def __repr__(self):
        names = " ".join(v.name for v in self.quantified)
        return f"QuantFormula(exists {names}; {len(self.atoms)} atoms)"
