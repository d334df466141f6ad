"""Dirichlet characters mod q via the CRT decomposition of the unit group.

Representation: (Z/q)^x is split into cyclic components, one per odd prime
power q_i = p^e (generated by the smallest primitive root), with 2^e
contributing nothing (e <= 1), one order-2 component generated by -1
(e = 2), or components of orders 2 and 2^(e-2) generated by -1 and 3
(e >= 3).  Generators are lifted to residues mod q that are 1 modulo the
other factors.  A character is an integer exponent per component; its value
at a unit with discrete log (e_1, ..., e_m) is exp(2 pi i sum a_j e_j / d_j).

Values are carried as an exact integer s modulo L = lcm(d_j): patched to
+-1, +-i whenever 4s = 0 (mod L), so real characters evaluate exactly and
conductor / parity logic can run on integers.

Character indexing contract: characters(q)[0] is principal and the sequence
is ordered lexicographically by exponent vector (C-order over the component
lattice).  Reports reference characters by this index.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DomainError
from .sieve import PrimeTable, factor

DEFAULT_GROUP_BUDGET = 1_000_000


@dataclass(frozen=True)
class GroupComponent:
    generator: int  # residue mod q, congruent to 1 modulo the other factors
    order: int


def _smallest_primitive_root(p: int, e: int, table: PrimeTable | None) -> int:
    """Exhaustive order test against the prime factorization of phi(p^e)."""
    q = p**e
    phi = p ** (e - 1) * (p - 1)
    phi_primes = [r for r, _ in factor(phi, table).factors]
    g = 2
    while True:
        if math.gcd(g, q) == 1 and all(pow(g, phi // r, q) != 1 for r in phi_primes):
            return g
        g += 1


class UnitGroupStructure:
    """CRT generator decomposition of (Z/q)^x plus its discrete-log table."""

    def __init__(self, q: int, budget: int = DEFAULT_GROUP_BUDGET,
                 table: PrimeTable | None = None):
        if q < 1:
            raise DomainError(f"modulus must be >= 1, got {q}")
        self.q = q
        components: list[GroupComponent] = []
        local = []  # (modulus piece, generator mod piece, order)
        for p, e in factor(q, table).factors:
            pe = p**e
            if p == 2:
                if e == 2:
                    local.append((pe, 3, 2))
                elif e >= 3:
                    local.append((pe, pe - 1, 2))
                    local.append((pe, 3, 2 ** (e - 2)))
            else:
                g = _smallest_primitive_root(p, e, table)
                local.append((pe, g, p ** (e - 1) * (p - 1)))
        phi = 1
        for _, _, order in local:
            phi *= order
        if phi > budget:
            raise CapacityError(f"phi({q}) = {phi} exceeds enumeration budget {budget}")
        for pe, g, order in local:
            rest = q // pe
            if rest == 1:
                lifted = g % q
            else:
                # x = g (mod pe), x = 1 (mod q/pe)
                inv = pow(pe, -1, rest)
                lifted = (g + pe * ((1 - g) * inv % rest)) % q
            components.append(GroupComponent(lifted, order))
        self.components = tuple(components)
        self.phi = phi
        self.orders = tuple(c.order for c in components)
        self.exponent = math.lcm(*self.orders) if components else 1

        # Enumerate the lattice in C-order; unit_residues[i] is the residue
        # whose exponent vector unravels from i.
        residues = np.empty(phi, dtype=np.int64)
        if components:
            vec = [1]
            for comp in components:
                powers, acc = [], 1
                for _ in range(comp.order):
                    powers.append(acc)
                    acc = acc * comp.generator % q
                vec = [v * w % q for v in vec for w in powers]
            residues[:] = vec
        else:
            residues[0] = 1 % q  # q in {1, 2}: the single unit (0 when q = 1)
        self.unit_residues = residues
        lattice = np.full(q, -1, dtype=np.int64)
        lattice[residues] = np.arange(phi)
        self.lattice_index = lattice
        shape = self.orders if components else (1,)
        self.exponent_vectors = np.stack(
            np.unravel_index(np.arange(phi), shape), axis=1
        ).astype(np.int64)

    def dlog(self, n: int) -> tuple[int, ...]:
        """Exponent vector of a residue coprime to q."""
        i = int(self.lattice_index[n % self.q])
        if i < 0:
            raise DomainError(f"{n} is not a unit mod {self.q}")
        if not self.components:
            return ()
        return tuple(int(e) for e in self.exponent_vectors[i])

    @property
    def lattice_shape(self) -> tuple[int, ...]:
        return self.orders if self.components else (1,)


@lru_cache(maxsize=64)
def unit_group(q: int, budget: int = DEFAULT_GROUP_BUDGET) -> UnitGroupStructure:
    return UnitGroupStructure(q, budget)


class DirichletCharacter:
    def __init__(self, group: UnitGroupStructure, exponents: tuple[int, ...], index: int):
        self.group = group
        self.q = group.q
        self.exponents = tuple(int(a) % d for a, d in zip(exponents, group.orders))
        self.index = index
        self._table = None
        self._phase = None
        self._conductor = None

    # -- value machinery ----------------------------------------------------

    def _phase_table(self) -> np.ndarray:
        """Integer s with chi = exp(2 pi i s / L) at each unit, -1 off units."""
        if self._phase is None:
            g = self.group
            L = g.exponent
            if g.components:
                w = np.array(
                    [a * (L // d) for a, d in zip(self.exponents, g.orders)],
                    dtype=np.int64,
                )
                s = (g.exponent_vectors @ w) % L
            else:
                s = np.zeros(1, dtype=np.int64)
            phase = np.full(self.q, -1, dtype=np.int64)
            phase[g.unit_residues] = s
            self._phase = phase
        return self._phase

    @property
    def table(self) -> np.ndarray:
        """Value cache: chi(r) for r = 0..q-1 (0 off the unit group)."""
        if self._table is None:
            L = self.group.exponent
            roots = np.exp(2j * np.pi * np.arange(L) / L)
            quarter = np.flatnonzero(4 * np.arange(L) % L == 0)
            exact = np.array([1, 1j, -1, -1j], dtype=np.complex128)
            roots[quarter] = exact[(4 * quarter // L) % 4]  # exact +-1, +-i
            phase = self._phase_table()
            values = np.zeros(self.q, dtype=np.complex128)
            on = phase >= 0
            values[on] = roots[phase[on]]
            self._table = values
        return self._table

    def __call__(self, n: int) -> complex:
        return complex(self.table[n % self.q])

    # -- structure ----------------------------------------------------------

    @property
    def is_principal(self) -> bool:
        return all(a == 0 for a in self.exponents)

    @property
    def is_real(self) -> bool:
        # chi^2 principal <=> every value in {-1, 0, 1}
        return all(2 * a % d == 0 for a, d in zip(self.exponents, self.group.orders))

    def conductor(self) -> int:
        """Least d | q with chi trivial on units that are 1 mod d."""
        if self._conductor is None:
            phase = self._phase_table()
            units = self.group.unit_residues
            best = self.q
            for d in factor(self.q).divisors():
                ok = all(phase[r] == 0 for r in units if r % d == 1 % d)
                if ok:
                    best = d
                    break
            self._conductor = best
        return self._conductor

    def descriptor(self) -> list:
        """Stable serialization: [q, [exponents...]]."""
        return [self.q, list(self.exponents)]

    def __repr__(self):
        return f"DirichletCharacter(q={self.q}, index={self.index}, exponents={self.exponents})"


def characters(q: int, budget: int = DEFAULT_GROUP_BUDGET) -> list[DirichletCharacter]:
    """All phi(q) characters mod q; index 0 principal, lexicographic exponents."""
    g = unit_group(q, budget)
    out = []
    ranges = [range(d) for d in g.orders] if g.components else [range(1)]
    for i, vec in enumerate(itertools.product(*ranges)):
        exps = vec if g.components else ()
        out.append(DirichletCharacter(g, exps, i))
    return out


def eval_character(chi: DirichletCharacter, n: int) -> complex:
    """chi(n mod q); 0 when gcd(n, q) > 1; periodic with period q."""
    return chi(n)


@dataclass(frozen=True)
class CharacterFlags:
    principal: bool
    real: bool
    primitive: bool
    parity: int  # chi(-1): +1 even, -1 odd


def classify(chi: DirichletCharacter) -> CharacterFlags:
    parity = chi(-1)
    return CharacterFlags(
        principal=chi.is_principal,
        real=chi.is_real,
        primitive=chi.conductor() == chi.q,
        parity=1 if parity.real > 0 else -1,
    )
