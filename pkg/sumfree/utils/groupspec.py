"""The ``--group`` grammar: cyclic factors ``Z<m>`` joined by ``*``, each
optionally repeated with ``^<count>``, e.g. ``Z2^3*Z9`` or ``Z2 * Z4 * Z3``.

Every modulus is split into its 2-power and odd parts, so ``Z6`` is
``Z2*Z3`` and ``Z12`` is ``Z4*Z3``.
"""

import re

from ..exceptions import OddOrderError, ParseError
from ..groups import make_group

FACTOR = re.compile(r"\s*Z(\d+)(?:\^(\d+))?\s*")


def split_modulus(m):
    """(a, q) with m = 2^a q and q odd."""
    a = 0
    while m % 2 == 0:
        m //= 2
        a += 1
    return a, m


def parse_factors(s):
    """The (modulus, count) pairs of a group spec, checked but not canonicalized."""
    factors = []
    position = 0
    while True:
        match = FACTOR.match(s, position)
        if match is None:
            raise ParseError(f'Expected a factor like "Z4" or "Z2^3" in "{s}"', position)
        modulus = int(match.group(1))
        count = int(match.group(2)) if match.group(2) is not None else 1
        if modulus < 2:
            raise ParseError(f"Cyclic factor Z{modulus} is trivial", match.start(1))
        if count < 1:
            raise ParseError("Repeat counts must be at least 1", match.start(2))
        factors.append((modulus, count))
        position = match.end()
        if position == len(s):
            return factors
        if s[position] != "*":
            raise ParseError(f'Expected "*" between factors in "{s}"', position)
        position += 1


def parse_group_spec(s, cap=None):
    even, odd = [], []
    for modulus, count in parse_factors(s):
        a, q = split_modulus(modulus)
        if a:
            even.extend([a] * count)
        if q > 1:
            odd.extend([q] * count)
    if not even:
        raise OddOrderError(f'"{s}" has odd order: the group needs a cyclic factor of even order')
    return make_group(even, odd, cap)
