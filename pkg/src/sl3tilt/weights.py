"""Weight lattice arithmetic for SL3 in the fundamental-weight basis."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple


class Weight(NamedTuple):
    a: int
    b: int

    def __add__(self, other):  # type: ignore[override]
        return Weight(self.a + other[0], self.b + other[1])

    def __sub__(self, other):
        return Weight(self.a - other[0], self.b - other[1])

    def scale(self, k: int) -> "Weight":
        return Weight(k * self.a, k * self.b)

    def flipped(self) -> "Weight":
        return Weight(self.b, self.a)

    def __str__(self) -> str:
        return f"({self.a},{self.b})"


ZERO = Weight(0, 0)
RHO = Weight(1, 1)
ALPHA1 = Weight(2, -1)
ALPHA2 = Weight(-1, 2)
POSITIVE_ROOTS = (ALPHA1, ALPHA2, Weight(1, 1))
MINUSCULE = (Weight(0, 0), Weight(1, 0), Weight(0, 1))
SUPPORTED_PRIMES = (2, 3)


class WeightError(ValueError):
    """Raised for weights outside the domain of an operation."""


def as_weight(w: Iterable[int]) -> Weight:
    a, b = w
    return Weight(int(a), int(b))


def is_dominant(w: Weight) -> bool:
    return w[0] >= 0 and w[1] >= 0


def is_restricted(p: int, w: Weight) -> bool:
    return 0 <= w[0] <= p - 1 and 0 <= w[1] <= p - 1


def in_steinberg_range(p: int, w: Weight) -> bool:
    """True when w lies in (p-1)rho + X_1."""
    return p - 1 <= w[0] <= 2 * p - 2 and p - 1 <= w[1] <= 2 * p - 2


def steinberg_weight(p: int) -> Weight:
    return Weight(p - 1, p - 1)


def _require_dominant(w: Weight) -> None:
    if not is_dominant(w):
        raise WeightError(f"weight {tuple(w)} is not dominant")


def _require_prime(p: int) -> None:
    if p not in SUPPORTED_PRIMES:
        raise WeightError(f"unsupported prime {p}; expected one of {SUPPORTED_PRIMES}")


def reflect(i: int, w: Weight) -> Weight:
    """Apply the simple reflection s_i."""
    a, b = w
    if i == 1:
        return Weight(-a, a + b)
    if i == 2:
        return Weight(a + b, -b)
    raise WeightError(f"simple root index must be 1 or 2, got {i}")


def weyl_group_images(w: Weight) -> list[Weight]:
    """The six images w(x) for x in the Weyl group, with repetitions."""
    w = as_weight(w)
    s1 = reflect(1, w)
    s2 = reflect(2, w)
    s12 = reflect(1, s2)
    s21 = reflect(2, s1)
    w0 = reflect(1, s21)
    return [w, s1, s2, s12, s21, w0]


def weyl_orbit(w: Weight) -> set[Weight]:
    return set(weyl_group_images(w))


def dominant_conjugate(w: Weight) -> Weight:
    a, b = w
    while a < 0 or b < 0:
        a, b = reflect(1, Weight(a, b)) if a < 0 else reflect(2, Weight(a, b))
    return Weight(a, b)


def in_root_lattice(w: Weight) -> bool:
    return (w[0] - w[1]) % 3 == 0


def symmetry_flip(x):
    """The diagram automorphism (a,b) -> (b,a), applied through any container."""
    if isinstance(x, tuple) and len(x) == 2 and all(isinstance(c, int) for c in x):
        return Weight(x[1], x[0])
    flip = getattr(x, "flipped", None)
    if flip is None:
        raise TypeError(f"cannot flip object of type {type(x).__name__}")
    return flip()


@dataclass(frozen=True)
class DigitVector:
    digits: tuple[Weight, ...]
    base: int

    def __iter__(self):
        return iter(self.digits)

    def __len__(self) -> int:
        return len(self.digits)

    def __getitem__(self, j: int) -> Weight:
        return self.digits[j]

    def __eq__(self, other) -> bool:
        if isinstance(other, DigitVector):
            return self.digits == other.digits and self.base == other.base
        if isinstance(other, (list, tuple)):
            return list(self.digits) == [tuple(d) for d in other]
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.digits, self.base))

    def get(self, j: int) -> Weight:
        """Digit j, or (0,0) past the end."""
        return self.digits[j] if j < len(self.digits) else ZERO

    def value(self) -> Weight:
        a = sum(d[0] * self.base**j for j, d in enumerate(self.digits))
        b = sum(d[1] * self.base**j for j, d in enumerate(self.digits))
        return Weight(a, b)


def _trim(digits: list[Weight]) -> tuple[Weight, ...]:
    while digits and digits[-1] == ZERO:
        digits.pop()
    return tuple(digits)


def steinberg_digits(p: int, lam: Weight) -> DigitVector:
    """Base-p digits of both coordinates, paired by position."""
    lam = as_weight(lam)
    _require_dominant(lam)
    a, b = lam
    digits = []
    while a or b:
        digits.append(Weight(a % p, b % p))
        a //= p
        b //= p
    return DigitVector(tuple(digits), p)


def tilting_digits(p: int, lam: Weight) -> DigitVector:
    """Expansion lam = sum a_j p^j with a_j in (p-1)rho + X_1 for all but the last digit."""
    lam = as_weight(lam)
    _require_dominant(lam)
    digits = []
    a, b = lam
    while a >= p - 1 and b >= p - 1:
        ra, sa = divmod(a - (p - 1), p)[::-1]
        rb, sb = divmod(b - (p - 1), p)[::-1]
        digits.append(Weight(p - 1 + ra, p - 1 + rb))
        a, b = sa, sb
    digits.append(Weight(a, b))
    return DigitVector(_trim(digits), p)


def dot_linked(p: int, lam: Weight, mu: Weight) -> bool:
    """Whether mu + rho lies in W(lam + rho) + p * (root lattice)."""
    lam, mu = as_weight(lam), as_weight(mu)
    _require_dominant(lam)
    _require_dominant(mu)
    target = mu + RHO
    for image in weyl_group_images(lam + RHO):
        x, y = target[0] - image[0], target[1] - image[1]
        if x % p == 0 and y % p == 0 and in_root_lattice(Weight(x // p, y // p)):
            return True
    return False


def weight_order_key(w: Weight) -> tuple[int, int]:
    """Total order refining dominance: by (a+b, a)."""
    return (w[0] + w[1], w[0])


def linkage_classes(p: int, weights: Iterable[Weight]) -> list[list[Weight]]:
    """Partition a set of dominant weights into dot-linkage classes.

    Classes are sorted internally by descending (a+b, a) and listed in
    order of their largest member, descending.
    """
    remaining = sorted({as_weight(w) for w in weights}, key=weight_order_key, reverse=True)
    classes: list[list[Weight]] = []
    for w in remaining:
        for cls in classes:
            if dot_linked(p, cls[0], w):
                cls.append(w)
                break
        else:
            classes.append([w])
    return classes
