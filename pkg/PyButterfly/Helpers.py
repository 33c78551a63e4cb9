import logging
logging.basicConfig(encoding='utf-8')
import regex
import numpy as np

from PyButterfly.ButterflyError import ArgumentError
from PyButterfly.Legendre import ParseParity, parities

def ParseIntegerList(text) -> list[int]:
    """
    Parse "1250", "0,64,1250" or "256 512" into a list of integers
    """
    if text is None:
        return []

    if isinstance(text, (list, tuple)):
        return [ value for item in text for value in ParseIntegerList(item) ]

    items = [ item for item in regex.split(r'[\s,;]+', str(text).strip()) if item ]
    if not items or not all(regex.fullmatch(r'\d+', item) for item in items):
        raise ArgumentError(f"Expected a comma-separated list of non-negative integers (got '{text}')")

    return [ int(item) for item in items ]

def ParseParityList(text) -> list[str]:
    """
    Parse "even", "odd", "even,odd" or "both"
    """
    if text is None or str(text).strip().lower() == 'both':
        return list(parities)

    return [ ParseParity(item) for item in regex.split(r'[\s,;]+', str(text).strip()) if item ]

def RandomGenerator(seed : int, stream : int = 0) -> np.random.Generator:
    """
    Philox counter-based generator; each stream starts at a disjoint counter offset
    """
    if seed < 0 or stream < 0:
        raise ArgumentError(f"Seed and stream must be non-negative (got {seed}, {stream})")

    return np.random.Generator(np.random.Philox(key=seed, counter=stream << 192))

def RandomUnitVector(n : int, seed : int, stream : int = 0):
    """
    Entries drawn uniformly from (-1, 1), normalized to unit l2 norm
    """
    vector = RandomGenerator(seed, stream).uniform(-1.0, 1.0, n)
    return vector / np.linalg.norm(vector)

def ReadVectorFile(filepath : str):
    """
    One decimal number per line; blank lines are ignored
    """
    with open(filepath, 'r', encoding='utf-8') as f:
        lines = [ line.strip() for line in f ]

    values = []
    for number, line in enumerate(lines, start=1):
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ArgumentError(f"Line {number} of {filepath} is not a number: '{line}'")

    return np.array(values)

def FormatVector(values) -> str:
    return "".join(f"{float(value)!r}\n" for value in values)

def WriteVectorFile(filepath : str, values):
    with open(filepath, 'w', encoding='utf-8') as f:
        f.write(FormatVector(values))
