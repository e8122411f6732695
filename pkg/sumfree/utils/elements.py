"""Element lists on the command line.

Elements are given either as integer labels (cyclic groups only) or as
residue tuples ``(1,3)``, separated by commas or spaces. A set may also be
``random:<p>:<seed>``, a p-random subset drawn from trial 0 of the seed.
"""

import re

from ..exceptions import ConfigurationError, ParseError
from ..groups import SampleSet, from_integer
from ..sampling import SampleLaw, sample

TOKEN = re.compile(r"\s*(\([^)]*\)|-?\d+)\s*,?")


def parse_element(g, token):
    token = token.strip()
    if token.startswith("("):
        try:
            residues = [int(part) for part in token.strip("()").split(",")]
        except ValueError:
            raise ParseError(f'Malformed residue tuple "{token}"', 0)
        return g.element(residues)
    return from_integer(g, int(token))


def parse_elements(g, text):
    """Dense indices of the listed elements, in the order given."""
    indices = []
    position = 0
    text = text.strip()
    while position < len(text):
        match = TOKEN.match(text, position)
        if match is None or match.end() == position:
            raise ParseError(f'Cannot read an element in "{text}"', position)
        indices.append(parse_element(g, match.group(1)).dense_index)
        position = match.end()
    return indices


def parse_set(g, text):
    if text.startswith("random:"):
        try:
            _, p, seed = text.split(":")
            law = SampleLaw.p_random(float(p))
            return sample(g, law, int(seed), 0)
        except ValueError:
            raise ConfigurationError(f'Expected random:<p>:<seed>, got "{text}"')
    return SampleSet.from_indices(g, parse_elements(g, text))
