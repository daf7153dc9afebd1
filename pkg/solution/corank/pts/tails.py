"""
Distributions over ℕ ∪ {∞} with a closed-form tail

A ``TailSpec`` is a finite set of atoms, an optional geometric tail over the
indices from ``start`` on, an atom at ∞, and optionally a residual mass known
only to lie strictly beyond ``residual_after``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Tuple


@dataclass(frozen=True)
class GeoTail:
    """Mass coeff·ratio^(i-start) at every index i ≥ start"""
    start: int
    coeff: Fraction
    ratio: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        object.__setattr__(self, "ratio", Fraction(self.ratio))
        if self.start < 0:
            raise ValueError("geometric tail must start at a natural index")
        if self.coeff < 0:
            raise ValueError("geometric coefficient must be nonnegative")
        if not 0 < self.ratio < 1:
            raise ValueError(f"geometric ratio {self.ratio} outside (0, 1)")

    @property
    def mass(self) -> Fraction:
        return self.coeff / (1 - self.ratio)

    def mass_at(self, index: int) -> Fraction:
        return self.coeff * self.ratio ** (index - self.start) if index >= self.start else Fraction(0)

    def cdf(self, a: int) -> Fraction:
        if a < self.start:
            return Fraction(0)
        return self.coeff * (1 - self.ratio ** (a - self.start + 1)) / (1 - self.ratio)


@dataclass(frozen=True)
class TailSpec:
    atoms: Mapping[int, Fraction] = field(default_factory=dict)
    geo: Optional[GeoTail] = None
    inf_mass: Fraction = Fraction(0)
    residual: Fraction = Fraction(0)
    residual_after: Optional[int] = None

    def __post_init__(self):
        atoms = {int(i): Fraction(m) for i, m in sorted(self.atoms.items())}
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "inf_mass", Fraction(self.inf_mass))
        object.__setattr__(self, "residual", Fraction(self.residual))
        if any(i < 0 for i in atoms):
            raise ValueError("atom indices must be natural numbers")
        if any(m < 0 for m in atoms.values()) or self.inf_mass < 0 or self.residual < 0:
            raise ValueError("masses must be nonnegative")
        if self.geo is not None and any(i >= self.geo.start for i in atoms):
            raise ValueError("atoms must lie below the start of the geometric tail")
        if self.residual > 0:
            if self.residual_after is None:
                raise ValueError("a residual mass needs the index it lies beyond")
            if self.geo is not None:
                raise ValueError("a residual mass cannot be combined with a geometric tail")
            if any(i > self.residual_after for i in atoms):
                raise ValueError("atoms must not lie beyond the residual cut")
        if self.total_mass != 1:
            raise ValueError(f"total mass is {self.total_mass}, not 1")

    @classmethod
    def dirac(cls, index: int) -> "TailSpec":
        return cls(atoms={index: Fraction(1)})

    @classmethod
    def at_infinity(cls) -> "TailSpec":
        return cls(inf_mass=Fraction(1))

    @property
    def total_mass(self) -> Fraction:
        geo = self.geo.mass if self.geo is not None else Fraction(0)
        return sum(self.atoms.values(), Fraction(0)) + geo + self.inf_mass + self.residual

    @property
    def finite_mass(self) -> Fraction:
        """φ([0, ∞)), the projection to a reachability bound"""
        return 1 - self.inf_mass

    @property
    def known_until(self) -> Optional[int]:
        """Largest index with an exact cdf, None when every index is exact"""
        return self.residual_after if self.residual > 0 else None

    def cdf(self, a: int) -> Fraction:
        """φ([0, a]); φ([0, -1]) = 0"""
        if a < 0:
            return Fraction(0)
        if self.known_until is not None and a > self.known_until:
            raise ValueError(f"cdf at {a} lies beyond the exact part (up to {self.known_until})")
        total = sum((m for i, m in self.atoms.items() if i <= a), Fraction(0))
        if self.geo is not None:
            total += self.geo.cdf(a)
        return total

    def closed_form(self) -> Tuple[int, Fraction, Fraction, Optional[Fraction]]:
        """
        (T, K, w, r) with φ([0, a]) = K - w·r^a for every a ≥ T.

        w is 0 and r is None without a geometric tail. Undefined when a
        residual mass is present.
        """
        if self.known_until is not None:
            raise ValueError("no closed form with a residual mass")
        atom_mass = sum(self.atoms.values(), Fraction(0))
        threshold = max(self.atoms) + 1 if self.atoms else 0
        if self.geo is None:
            return threshold, atom_mass, Fraction(0), None
        geo = self.geo
        weight = geo.coeff * geo.ratio ** (1 - geo.start) / (1 - geo.ratio)
        return max(threshold, geo.start), atom_mass + geo.mass, weight, geo.ratio
