"""Monomial bases of the degree-k polynomial spaces."""
from __future__ import annotations

import dataclasses
import math
from typing import List, Tuple


def dimension(n: int, k: int) -> int:
    """Number of monomials of total degree at most k in n variables."""
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    if k > 10**6:
        raise OverflowError("degree out of supported range")
    return math.comb(n + k, n)


@dataclasses.dataclass(frozen=True)
class MonomialBasis:
    n: int
    k: int
    multi_indices: Tuple[Tuple[int, ...], ...]

    @classmethod
    def build(cls, n: int, k: int) -> "MonomialBasis":
        idx: List[Tuple[int, ...]] = []
        if n == 1:
            idx = [(d,) for d in range(k + 1)]
        elif n == 2:
            # graded, lexicographic within each degree
            idx = [(d - j, j) for d in range(k + 1) for j in range(d + 1)]
        else:
            raise NotImplementedError("bases shipped for n in {1, 2}")
        return cls(n=n, k=k, multi_indices=tuple(idx))

    def __post_init__(self):
        if len(self.multi_indices) != dimension(self.n, self.k):
            raise ValueError("index count does not match the dimension")
        if len(set(self.multi_indices)) != len(self.multi_indices):
            raise ValueError("duplicate multi-indices")

    @property
    def size(self) -> int:
        return len(self.multi_indices)

    def degrees(self):
        import numpy as np
        return np.array([sum(a) for a in self.multi_indices])
