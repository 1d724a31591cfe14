"""
Permutation helpers in one-line notation (image arrays)
sigma[x] is the image of x; products compose right-to-left: (a*b)[x] = a[b[x]]
"""
from itertools import permutations
from typing import Iterator, List, Tuple

from fourier_nc.models import Partition, Permutation


def identity(k: int) -> Permutation:
    return tuple(range(k))


def compose(a: Permutation, b: Permutation) -> Permutation:
    """a * b, apply b first"""
    return tuple(a[x] for x in b)


def inverse(a: Permutation) -> Permutation:
    result = [0] * len(a)
    for x, image in enumerate(a):
        result[image] = x
    return tuple(result)


def relative(a: Permutation, b: Permutation) -> Permutation:
    """a^{-1} * b"""
    return compose(inverse(a), b)


def cycle_type(a: Permutation) -> Partition:
    seen = [False] * len(a)
    lengths = []
    for start in range(len(a)):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = a[x]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def fixed_points(a: Permutation) -> int:
    return sum(1 for x, image in enumerate(a) if x == image)


def inversions(a: Permutation) -> int:
    k = len(a)
    return sum(1 for x in range(k) for y in range(x + 1, k) if a[x] > a[y])


def all_permutations(k: int) -> Iterator[Permutation]:
    """Every permutation of range(k) in lexicographic order"""
    return permutations(range(k))


def class_representative(parts: Partition) -> Permutation:
    """Lexicographically smallest permutation with the given cycle type

    Cycles sit on consecutive points in ascending length, each (s, s+1, ..., s+l-1)
    mapped to its successor.
    """
    image = []
    start = 0
    for length in sorted(parts):
        image.extend(start + (offset + 1) % length for offset in range(length))
        start += length
    return tuple(image)


def class_members(parts: Partition) -> List[Permutation]:
    """Every permutation with the given cycle type, sorted lexicographically"""
    k = sum(parts)
    image = list(range(k))
    members = []

    def build(unused: frozenset, lengths: Tuple[int, ...]) -> None:
        if not unused:
            members.append(tuple(image))
            return
        lead = min(unused)
        rest = unused - {lead}
        for length in sorted(set(lengths)):
            remaining = list(lengths)
            remaining.remove(length)
            for tail in permutations(sorted(rest), length - 1):
                cycle = (lead,) + tail
                for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                    image[a] = b
                build(rest - set(tail), tuple(remaining))

    build(frozenset(range(k)), tuple(parts))
    return sorted(members)


def as_tuple(values) -> Tuple[int, ...]:
    return tuple(int(v) for v in values)
