"""Complex element lengths for exponentially convergent interval meshes.

The mesh for an interval of length L consists of n elements whose complex
lengths are L_j = 2L/x_j, where x_j are the roots of the degree-n denominator
polynomial of the diagonal rational approximant of the exponential. The
lengths come in conjugate pairs (plus one real length for odd n), sum to L,
and have positive real parts, so the mesh starts and ends on the real axis.
"""
from __future__ import annotations

import cmath
import functools
import math
import pathlib
from dataclasses import dataclass, field, replace
from enum import Enum

import mpmath
import numpy as np

MAX_VALIDATED_ELEMENTS = 16


class Ordering(str, Enum):
    PHASE_MONOTONE = "phase_monotone"
    CONJUGATE_INTERLEAVED = "conjugate_interleaved"
    CUSTOM_PERMUTATION = "custom_permutation"


@dataclass(frozen=True)
class PadePolynomial:
    """Coefficients (ascending powers) of the length-generating polynomial."""

    n: int
    coeffs: tuple[float, ...]


@dataclass(frozen=True)
class PadeGrid:
    """Ordered complex element lengths covering a real interval."""

    n: int
    total_length: float
    lengths: tuple[complex, ...]
    ordering: Ordering = Ordering.PHASE_MONOTONE

    def __post_init__(self):
        if self.n != len(self.lengths):
            raise ValueError("n must equal len(lengths)")

    def node_positions(self) -> np.ndarray:
        """Complex coordinates of the n+1 mesh nodes (partial length sums)."""
        return np.concatenate(([0.0 + 0.0j], np.cumsum(np.asarray(self.lengths))))

    def scaled(self, total_length: float) -> "PadeGrid":
        factor = total_length / self.total_length
        return replace(
            self,
            total_length=total_length,
            lengths=tuple(l * factor for l in self.lengths),
        )


def pade_polynomial(n: int) -> PadePolynomial:
    """Integer coefficients c_j = (-1)^j (2n-j)!/(j!(n-j)!) for j = 0..n."""
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    if n > 60:
        # factorials overflow double precision far before this, and the
        # root finder has only been validated up to n = 16
        raise ValueError("n too large for a float-representable polynomial")
    coeffs = tuple(
        (-1) ** j * math.factorial(2 * n - j) // (math.factorial(j) * math.factorial(n - j))
        for j in range(n + 1)
    )
    return PadePolynomial(n=n, coeffs=coeffs)


def element_lengths(n: int, total_length: float) -> PadeGrid:
    """Phase-monotone grid of n complex lengths summing to total_length."""
    if total_length <= 0:
        raise ValueError("total_length must be positive")
    poly = pade_polynomial(n)
    lengths = _pair_conjugates(2.0 / _exact_roots(n))
    grid = PadeGrid(
        n=n,
        total_length=1.0,
        lengths=tuple(lengths),
        ordering=Ordering.PHASE_MONOTONE,
    )
    return order_phase_monotone(grid).scaled(total_length)


_ROOT_CACHE_PATH = pathlib.Path(__file__).parent / "data" / "pade_roots.npz"


@functools.lru_cache(maxsize=None)
def _exact_roots(n: int) -> np.ndarray:
    """Roots of the degree-n length polynomial, solved in extended precision.

    The integer coefficients grow to ~1.2e18 by n = 16 and the roots nearest
    the real axis are badly conditioned, so a double-precision companion
    solve is only good to ~1e-8 relative there. Solving with the exact
    integer coefficients in 50-digit arithmetic gives roots accurate to full
    double precision for every n used in practice (validated through n = 16,
    exercised through n = 60 by the convergence sweeps). Because the
    extended-precision solve is slow (seconds per call at high n), roots for
    common orders ship precomputed in data/pade_roots.npz; the file is
    regenerated by scripts/generate_root_cache.py and is a pure cache.
    """
    if _ROOT_CACHE_PATH.exists():
        with np.load(_ROOT_CACHE_PATH) as cache:
            key = f"n{n}"
            if key in cache:
                return cache[key]
    return _compute_roots(n)


def _compute_roots(n: int) -> np.ndarray:
    ints = [int(c) for c in pade_polynomial(n).coeffs]
    with mpmath.workdps(50):
        roots = mpmath.polyroots(ints[::-1], maxsteps=200, extraprec=200)
    return np.asarray([complex(r) for r in roots], dtype=complex)


def _pair_conjugates(lengths: np.ndarray) -> list[complex]:
    """Enforce exact conjugate symmetry on an eigenvalue-derived length set.

    Eigenvalue routines perturb the two members of a conjugate pair
    independently; averaging a length with the conjugate of its partner
    restores exact symmetry. For odd counts the entry with the smallest
    |imag| is snapped onto the real axis.
    """
    items = sorted((complex(l) for l in lengths), key=lambda l: abs(l.imag))
    out: list[complex] = []
    if len(items) % 2 == 1:
        out.append(complex(items.pop(0).real, 0.0))
    items.sort(key=lambda l: (l.real, abs(l.imag)))
    by_sign: dict[int, list[complex]] = {1: [], -1: []}
    for l in items:
        by_sign[1 if l.imag >= 0 else -1].append(l)
    if len(by_sign[1]) != len(by_sign[-1]):
        raise ValueError("lengths do not come in conjugate pairs")
    for upper, low in zip(by_sign[1], by_sign[-1]):
        avg = (upper + low.conjugate()) / 2
        out.append(avg)
        out.append(avg.conjugate())
    return out


def order_phase_monotone(grid: PadeGrid) -> PadeGrid:
    """Sort lengths by increasing phase angle (the symmetric, smooth mesh)."""
    if not grid.lengths:
        raise ValueError("grid has no lengths")
    ordered = tuple(sorted(grid.lengths, key=lambda l: (cmath.phase(l), -abs(l))))
    return replace(grid, lengths=ordered, ordering=Ordering.PHASE_MONOTONE)


def reorder_conjugate_interleave(grid: PadeGrid) -> PadeGrid:
    """Swap alternate left-half elements with their mirror (conjugate) partners.

    Starting from the phase-monotone ordering, positions 1, 3, 5, ... within
    the left half are exchanged with positions n, n-2, ... This alternates
    the signs of the imaginary parts so the nodal coordinates stay close to
    the real axis, which suppresses round-off growth at high frequencies.
    """
    if grid.ordering is not Ordering.PHASE_MONOTONE:
        grid = order_phase_monotone(grid)
    n = grid.n
    lengths = list(grid.lengths)
    for j in range(1, n // 2 + 1, 2):  # 1-based positions 1, 3, 5, ...
        a, b = j - 1, n - j
        lengths[a], lengths[b] = lengths[b], lengths[a]
    return replace(
        grid, lengths=tuple(lengths), ordering=Ordering.CONJUGATE_INTERLEAVED
    )


def make_grid(n: int, total_length: float, ordering: str | Ordering = Ordering.PHASE_MONOTONE) -> PadeGrid:
    """Convenience constructor: compute lengths and apply the given ordering."""
    grid = element_lengths(n, total_length)
    ordering = Ordering(ordering)
    if ordering is Ordering.CONJUGATE_INTERLEAVED:
        grid = reorder_conjugate_interleave(grid)
    elif ordering is Ordering.CUSTOM_PERMUTATION:
        raise ValueError("custom permutations must be applied by the caller")
    return grid


@dataclass(frozen=True)
class TableValidationReport:
    n: int
    deviations: tuple[float, ...] = field(default=())

    @property
    def max_deviation(self) -> float:
        return max(self.deviations)

    @property
    def passed(self) -> bool:
        return self.max_deviation <= 1e-12


def validate_against_table(n: int) -> TableValidationReport:
    """Per-element relative deviation of computed lengths from the embedded
    reference values for the unit interval (n = 1..16)."""
    if n not in REFERENCE_UNIT_LENGTHS:
        raise ValueError(f"no reference lengths for n={n}")
    computed = sorted(element_lengths(n, 1.0).lengths, key=lambda l: (l.imag, l.real))
    reference = sorted(REFERENCE_UNIT_LENGTHS[n], key=lambda l: (l.imag, l.real))
    deviations = tuple(
        abs(c - r) / abs(r) for c, r in zip(computed, reference)
    )
    return TableValidationReport(n=n, deviations=deviations)


def _rows(*entries) -> tuple[complex, ...]:
    """Expand (re, im) pairs into conjugate pairs; bare reals stay single."""
    out = []
    for e in entries:
        if isinstance(e, tuple):
            re, im = e
            out.append(complex(re, im))
            out.append(complex(re, -im))
        else:
            out.append(complex(e, 0.0))
    return tuple(out)


# Reference element lengths for the unit interval, 14+ significant digits.
REFERENCE_UNIT_LENGTHS: dict[int, tuple[complex, ...]] = {
    1: _rows(1.00000000000000),
    2: _rows((0.50000000000000, 0.28867513459481)),
    3: _rows((0.28468557688388, 0.27159985141630), 0.43062884623222),
    4: _rows((0.18313248053143, 0.23132522602625),
             (0.31686751946856, 0.09488202514221)),
    5: _rows((0.12803667831541, 0.19668213834621),
             (0.23485450871940, 0.12209940763707), 0.27421762593037),
    6: _rows((0.09489061789607, 0.16944514819433),
             (0.17914640739749, 0.12594324946340),
             (0.22596297470643, 0.04614135671779)),
    7: _rows((0.07338559568636, 0.14811940741461),
             (0.14065739395847, 0.12154781833235),
             (0.18538954553266, 0.06776497788782), 0.20113492964499),
    8: _rows((0.05861791492234, 0.13119236974564),
             (0.11325833004971, 0.11445496413908),
             (0.15337794771885, 0.07709430353886),
             (0.17474580730908, 0.02713226173787)),
    9: _rows((0.04802049907890, 0.11752570488080),
             (0.09316287173966, 0.10679717990370),
             (0.12840441052931, 0.08014721079992),
             (0.15100957026047, 0.04281546509628), 0.158805296783284),
    10: _rows((0.04014472910062, 0.10630697796687),
              (0.07802273616547, 0.09940003581225),
              (0.10881874816902, 0.07996015060428),
              (0.13078256453612, 0.05163001172938),
              (0.14223122202876, 0.01782841382104)),
    11: _rows((0.03412261657800, 0.09695789626293),
              (0.06634486381072, 0.09256005182226),
              (0.09329088025857, 0.07811366645707),
              (0.11386072467713, 0.05628616844255),
              (0.12678425930221, 0.02942684799389), 0.131193310746699),
    12: _rows((0.02940803944815, 0.08906181395662),
              (0.05715192456673, 0.08635352530097),
              (0.08082582076929, 0.07545289071966),
              (0.09976290741316, 0.05839885662872),
              (0.11301395814524, 0.03687019624343),
              (0.11983734965741, 0.01259866487095)),
    13: _rows((0.02564318775369, 0.08231355321087),
              (0.04978573946440, 0.08076582096948),
              (0.07069390925651, 0.07243833050796),
              (0.08799247146698, 0.05894563008011),
              (0.10097469339377, 0.04152986688324),
              (0.10902977699627, 0.02144314210934), 0.11176044333671),
    14: _rows((0.02258550311646, 0.07648569373967),
              (0.04379127631258, 0.07574740948845),
              (0.06236027779351, 0.06932300610809),
              (0.07811546938314, 0.05852853926583),
              (0.09053178744825, 0.04431195125450),
              (0.09911464460927, 0.02760255210502),
              (0.10350104133675, 0.00937153174338)),
    15: _rows((0.02006570730347, 0.07140591920396),
              (0.03884638966705, 0.07123849065223),
              (0.05542991160544, 0.06624511011050),
              (0.06977487505357, 0.05752432367232),
              (0.08149231310591, 0.04581962272804),
              (0.09018490369015, 0.03183750267162),
              (0.09553514496841, 0.01630985840134), 0.09734150921194),
    16: _rows((0.01796266496341, 0.06694162366630),
              (0.03471809507502, 0.06717964470869),
              (0.04960794930403, 0.06327803486714),
              (0.06268398209122, 0.05617188543383),
              (0.07365957371625, 0.04645858465651),
              (0.08221667350938, 0.03468717833984),
              (0.08808374597041, 0.02141958057287),
              (0.09106731537025, 0.00724175169196)),
}
