"""Seeded sampling of (sparse) SYK-q and two-color SYK Hamiltonians.

Sampling walks every index set in lexicographic order and consumes one
Philox stream per (seed, model) pair: first a block of uniforms (the
Bernoulli keep/drop draws, realized as ``u < p``), then a block of standard
normals (the couplings).  The normals are drawn whether or not the term is
kept, so for a fixed seed the coupling of an index set is identical across
all sparsities and the kept sets are nested as ``p`` grows.
"""

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from .majorana import PackedTerms, hermitian_canonical, monomial, multiply, weyl_brauer
from .rng import stream

P_MIN_EPSILON = 0.1


@dataclass(frozen=True)
class SykInstance:
    """A sampled sparse SYK-q Hamiltonian: kept terms plus sampling metadata."""

    n: int
    q: int
    p: float
    seed: int
    terms: tuple  # of (coefficient, Hermitian-canonical MajoranaMonomial)

    @property
    def normalization(self):
        return 1.0 / math.sqrt(math.comb(2 * self.n, self.q) * self.p)

    @property
    def model(self):
        return "syk" if self.p == 1 else "ssyk"

    @cached_property
    def packed(self):
        return PackedTerms(self.terms, self.n)

    def couplings(self):
        """Map support-index tuple -> raw standard-normal draw J_I (kept terms)."""
        return {m.indices: c / self.normalization for c, m in self.terms}

    def to_dict(self):
        return {
            "model": self.model,
            "n": self.n,
            "q": self.q,
            "p": self.p,
            "seed": self.seed,
            "terms": [
                {"indices": list(m.indices), "coeff": c} for c, m in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, data):
        n = int(data["n"])
        terms = tuple(
            (float(t["coeff"]), hermitian_canonical(t["indices"], n))
            for t in data["terms"]
        )
        return cls(n=n, q=int(data["q"]), p=float(data["p"]),
                   seed=int(data["seed"]), terms=terms)


@dataclass(frozen=True)
class TwoColorInstance:
    """Sparse two-color SYK: per-color degree-3 sub-Hamiltonians tau_j.

    Monomials live on the extended register of ``n1 + 2*n2`` Majoranas with
    the index map phi_i -> i, chi_j -> n1 + j, sigma_j -> n1 + n2 + j (the
    sigma block is the ancilla range used by the variational rotation).
    """

    n1: int
    n2: int
    p: float
    seed: int
    tau_terms: tuple  # tau_terms[j - 1] = tuple of (coefficient, i*phi_S monomial)

    def __post_init__(self):
        if self.n1 < 3:
            raise ValueError("n1 must be at least 3")
        if (self.n1 + 2 * self.n2) % 2 != 0:
            raise ValueError("n1 + 2*n2 must be even (integral qubit count)")

    @property
    def n_majoranas(self):
        return self.n1 + 2 * self.n2

    @property
    def n_modes(self):
        return self.n_majoranas // 2

    @property
    def tau_normalization(self):
        return 1.0 / math.sqrt(math.comb(self.n1, 3) * self.p)

    def chi_monomial(self, j):
        return weyl_brauer(self.n1 + j, self.n_modes)

    def sigma_monomial(self, j):
        return weyl_brauer(self.n1 + self.n2 + j, self.n_modes)

    def h2_terms(self):
        """Flat term list of H = (i/sqrt(n2)) sum_j tau_j chi_j.

        Each term is degree 4 in Hermitian-canonical form (quarter-phase 2).
        """
        scale = 1.0 / math.sqrt(self.n2)
        out = []
        for j in range(1, self.n2 + 1):
            chi = self.chi_monomial(j)
            for coeff, mon in self.tau_terms[j - 1]:
                out.append((coeff * scale, multiply(mon, chi).with_extra_phase(1)))
        return tuple(out)

    @cached_property
    def packed(self):
        return PackedTerms(self.h2_terms(), self.n_modes)

    def to_dict(self):
        return {
            "model": "two-color",
            "n1": self.n1,
            "n2": self.n2,
            "q": 4,
            "p": self.p,
            "seed": self.seed,
            "terms": [
                {"color": j + 1, "indices": list(m.indices), "coeff": c}
                for j, terms in enumerate(self.tau_terms)
                for c, m in terms
            ],
        }

    @classmethod
    def from_dict(cls, data):
        n1, n2 = int(data["n1"]), int(data["n2"])
        n_modes = (n1 + 2 * n2) // 2
        buckets = [[] for _ in range(n2)]
        for t in data["terms"]:
            mon = monomial(t["indices"], n_modes, phase_quarter=1)
            buckets[int(t["color"]) - 1].append((float(t["coeff"]), mon))
        return cls(n1=n1, n2=n2, p=float(data["p"]), seed=int(data["seed"]),
                   tau_terms=tuple(tuple(b) for b in buckets))


@dataclass(frozen=True)
class EnsembleSpec:
    """Parameter grid for an ensemble study."""

    model: str  # syk | ssyk | two-color
    p_grid: tuple
    trials: int
    base_seed: int
    n: int | None = None
    q: int = 4
    n1: int | None = None
    n2: int | None = None
    method: str = "auto"  # spectral method: auto | dense | lanczos
    tol: float = 1e-8

    def validate(self):
        problems = []
        if self.model not in ("syk", "ssyk", "two-color"):
            problems.append(f"unknown model {self.model!r}")
        if not self.p_grid:
            problems.append("empty p grid")
        for p in self.p_grid:
            if not 0 < p <= 1:
                problems.append(f"p={p} outside (0, 1]")
        if self.trials < 1:
            problems.append("trial count must be positive")
        ns = []
        if self.model == "two-color":
            if self.n1 is None or self.n2 is None:
                problems.append("two-color model needs n1 and n2")
        elif self.n is None:
            problems.append(f"model {self.model!r} needs n")
        else:
            ns = [self.n] if isinstance(self.n, int) else list(self.n)
            for n in ns:
                if self.q % 2 != 0 or not 4 <= self.q <= 2 * n:
                    problems.append(
                        f"q={self.q} must be even with 4 <= q <= 2n = {2 * n}"
                    )
        if problems:
            raise ValueError("; ".join(problems))
        for n in ns:
            p_min = P_MIN_EPSILON / n ** (self.q - 1)
            for p in self.p_grid:
                if p < p_min:
                    warnings.warn(
                        f"p={p} below p_min={p_min:.3g} at n={n}; "
                        "isolated modes likely"
                    )
        return self


def sample_syk(n, q, p, seed):
    """Sample a sparse SYK-q instance; p=1 gives the dense model.

    All binom(2n, q) index sets are visited in lexicographic order; the
    stream layout is one uniform block then one normal block, both in that
    order.
    """
    if q % 2 != 0 or not 4 <= q <= 2 * n:
        raise ValueError(f"q={q} must be even with 4 <= q <= 2n={2 * n}")
    if not 0 < p <= 1:
        raise ValueError(f"p={p} outside (0, 1]")
    p_min = P_MIN_EPSILON / n ** (q - 1)
    if p < p_min:
        warnings.warn(f"p={p} below p_min={p_min:.3g}; isolated modes likely")
    count = math.comb(2 * n, q)
    gen = stream(seed, "syk")
    keep = gen.random(count) < p
    normals = gen.standard_normal(count)
    norm = 1.0 / math.sqrt(count * p)
    terms = tuple(
        (norm * normals[r], hermitian_canonical(idx, n))
        for r, idx in enumerate(combinations(range(1, 2 * n + 1), q))
        if keep[r]
    )
    if not terms:
        warnings.warn(f"all {count} terms dropped at p={p}; empty Hamiltonian")
    return SykInstance(n=n, q=q, p=p, seed=seed, terms=terms)


def sample_two_color(n1, n2, p, seed):
    """Sample a sparse two-color instance: n2 colors, degree-3 terms on [n1]."""
    if n1 < 3:
        raise ValueError("n1 must be at least 3")
    if (n1 + 2 * n2) % 2 != 0:
        raise ValueError("n1 + 2*n2 must be even")
    if not 0 < p <= 1:
        raise ValueError(f"p={p} outside (0, 1]")
    n_modes = (n1 + 2 * n2) // 2
    count = math.comb(n1, 3)
    gen = stream(seed, "two-color")
    keep = gen.random((n2, count)) < p
    normals = gen.standard_normal((n2, count))
    norm = 1.0 / math.sqrt(count * p)
    subsets = list(combinations(range(1, n1 + 1), 3))
    tau_terms = tuple(
        tuple(
            (norm * normals[j, r], monomial(s, n_modes, phase_quarter=1))
            for r, s in enumerate(subsets)
            if keep[j, r]
        )
        for j in range(n2)
    )
    if all(len(t) == 0 for t in tau_terms):
        warnings.warn(f"all couplings dropped at p={p}; empty Hamiltonian")
    return TwoColorInstance(n1=n1, n2=n2, p=p, seed=seed, tau_terms=tau_terms)


def default_partition(n):
    """Default A/B split size n1 for a 2n-Majorana register: about three
    quarters of the Majoranas, rounded even so the extended register has an
    integral qubit count."""
    n1 = round(3 * (2 * n) / 4)
    if n1 % 2 != 0:
        n1 -= 1
    return n1


def extract_two_color(h, n1):
    """Split a q=4 instance into the two-color part and the remainder.

    Returns ``(two_color, c3, tbar_terms)`` where terms of ``h`` with exactly
    three indices in A = [n1] and one in B = [2n] \\ A are re-expressed as a
    TwoColorInstance scaled so that H_T = c3 * H_twocolor, and ``tbar_terms``
    are the remaining (coefficient, monomial) pairs on the original register.
    """
    if h.q != 4:
        raise ValueError("two-color extraction is defined for q = 4")
    n = h.n
    n2 = 2 * n - n1
    if not (0.1 * n <= n1 and 0.1 * n <= n2):
        raise ValueError(f"partition sizes n1={n1}, n2={n2} violate 0.1n lower bound")
    if n1 < 3 or n1 > 2 * n - 1:
        raise ValueError(f"n1={n1} outside [3, 2n-1]")
    if n1 % 2 != 0:
        raise ValueError("n1 must be even so the extended register has whole qubits")
    ext_modes = (n1 + 2 * n2) // 2
    tau_norm = 1.0 / math.sqrt(math.comb(n1, 3) * h.p)
    buckets = [[] for _ in range(n2)]
    tbar = []
    for coeff, mon in h.terms:
        idx = mon.indices
        if idx[2] <= n1 < idx[3]:  # three smallest in A, largest in B
            j = idx[3] - n1
            coupling = coeff / h.normalization
            buckets[j - 1].append(
                (tau_norm * coupling, monomial(idx[:3], ext_modes, phase_quarter=1))
            )
        else:
            tbar.append((coeff, mon))
    c3 = 2.0 * math.sqrt(
        n2 * math.comb(n1, 3) / (2 * n * math.comb(2 * n - 1, 3))
    )
    two_color = TwoColorInstance(
        n1=n1, n2=n2, p=h.p, seed=h.seed,
        tau_terms=tuple(tuple(b) for b in buckets),
    )
    return two_color, c3, tuple(tbar)
