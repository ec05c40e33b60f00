"""Dense GF(2) linear algebra on integer bitmask rows.

A vector over GF(2) is a Python int whose bit j is coordinate j; a matrix
is a sequence of such rows. Addition is xor, which keeps elimination exact
and fast at any width.
"""

from typing import Dict, Iterable, List, Optional, Sequence, Tuple


def row_reduce(rows: Iterable[int]) -> Dict[int, int]:
    """Reduced echelon basis of the row space, keyed by pivot bit.

    Every returned row has its pivot as lowest set bit and no other row's
    pivot anywhere.
    """
    pivots: Dict[int, int] = {}
    for row in rows:
        for p, r in list(pivots.items()):
            if (row >> p) & 1:
                row ^= r
        if row == 0:
            continue
        p = (row & -row).bit_length() - 1
        for q in list(pivots):
            if (pivots[q] >> p) & 1:
                pivots[q] ^= row
        pivots[p] = row
    return pivots


def reduce_vector(vec: int, pivots: Dict[int, int]) -> int:
    for p, r in pivots.items():
        if (vec >> p) & 1:
            vec ^= r
    return vec


def rank(rows: Iterable[int]) -> int:
    return len(row_reduce(rows))


def in_span(vec: int, rows: Iterable[int]) -> bool:
    return reduce_vector(vec, row_reduce(rows)) == 0


def kernel(rows: Sequence[int], width: int) -> List[int]:
    """Basis of {x : every row has even overlap with x}, echelon normalized."""
    pivots = row_reduce(rows)
    basis = []
    for f in range(width):
        if f in pivots:
            continue
        vec = 1 << f
        for p, r in pivots.items():
            if (r >> f) & 1:
                vec |= 1 << p
        basis.append(vec)
    return basis


def solve(rows: Sequence[int], target: int) -> Optional[int]:
    """Bitmask of a row subset summing to target, or None.

    Bit i of the result selects rows[i].
    """
    pivots: Dict[int, Tuple[int, int]] = {}
    for i, row in enumerate(rows):
        combo = 1 << i
        for p, (r, c) in list(pivots.items()):
            if (row >> p) & 1:
                row ^= r
                combo ^= c
        if row:
            p = (row & -row).bit_length() - 1
            for q in list(pivots):
                if (pivots[q][0] >> p) & 1:
                    pivots[q] = (pivots[q][0] ^ row, pivots[q][1] ^ combo)
            pivots[p] = (row, combo)
    combo = 0
    for p, (r, c) in pivots.items():
        if (target >> p) & 1:
            target ^= r
            combo ^= c
    return combo if target == 0 else None


def quotient_basis(space: Sequence[int], sub: Sequence[int]) -> List[int]:
    """Vectors of `space` that are independent modulo span(sub), in order."""
    pivots = row_reduce(sub)
    out = []
    for vec in space:
        residue = reduce_vector(vec, pivots)
        if residue == 0:
            continue
        out.append(vec)
        p = (residue & -residue).bit_length() - 1
        for q in list(pivots):
            if (pivots[q] >> p) & 1:
                pivots[q] ^= residue
        pivots[p] = residue
    return out


def mask_columns(row: int, keep: int) -> int:
    return row & keep
