"""Fibonacci strings, their noisy variants and the grammars G_0 and G_k."""

import logging
from functools import lru_cache
from typing import Sequence

import numpy as np

from pcfgcompress.constants import FIB_CLEAN_LETTERS, MAX_NOISE_LETTERS
from pcfgcompress.enums import NoiseKind
from pcfgcompress.exceptions import (
    ChoiceOutOfRange,
    IllegalLetter,
    InvalidIndex,
    LengthMismatch,
)
from pcfgcompress.objects import (
    ChoiceSequence,
    Grammar,
    NoiseSpec,
    NoisyFibText,
    Pcfg,
    Symbol,
    noise_letters,
)

logger = logging.getLogger(__name__)

# v_0 derives terminal 0 ('b'), v_1 derives terminal 1 ('a').
_LEAF_TERMINAL = (0, 1)


@lru_cache(maxsize=64)
def fib_string(m: int) -> bytes:
    """
    Returns the m-th Fibonacci string: Fib_0 = b, Fib_1 = a, Fib_m = Fib_{m-1} Fib_{m-2}.

    Example:
        >>> fib_string(5)
        b'abaababa'
    """
    if m < 0:
        raise InvalidIndex(f"Fibonacci index {m} is negative")
    previous, current = b"b", b"a"
    if m == 0:
        return previous
    for _ in range(m - 1):
        previous, current = current, current + previous
    return current


def fib_length(m: int) -> int:
    previous, current = 1, 1
    for _ in range(m - 1):
        previous, current = current, current + previous
    return current


def _check_index(m: int) -> None:
    if m < 2:
        raise InvalidIndex(f"Fibonacci grammars need m >= 2, got {m}")


def build_g(m: int, k: int) -> Pcfg:
    """
    Builds G_0 (``k == 0``) or G_k (``k >= 1``) on top of the Fibonacci SLP.

    Choice 0 at v_0 and v_1 is the clean letter. G_0 adds v_0 -> a and
    v_1 -> b; G_k adds v_0 -> c_j and v_1 -> c_j for j = 1..k.

    Args:
        m (int): Fibonacci index, at least 2.
        k (int): Grammar index.

    Returns:
        Pcfg: The grammar in adaptive probability mode.
    """
    _check_index(m)
    if not 0 <= k <= MAX_NOISE_LETTERS:
        raise InvalidIndex(f"grammar index k={k} outside 0..{MAX_NOISE_LETTERS}")
    terminals = FIB_CLEAN_LETTERS + noise_letters(k)
    b, a = (Symbol.terminal(t) for t in _LEAF_TERMINAL)
    if k == 0:
        leaves = [[[b], [a]], [[a], [b]]]
    else:
        extra = [[Symbol.terminal(len(FIB_CLEAN_LETTERS) + j)] for j in range(k)]
        leaves = [[[b], *extra], [[a], *extra]]
    bodies = leaves + [
        [[Symbol.nonterminal(i - 1), Symbol.nonterminal(i - 2)]] for i in range(2, m + 1)
    ]
    return Pcfg.adaptive(Grammar.from_bodies(terminals, bodies, [Symbol.nonterminal(m)]))


def fibonacci_slp(m: int) -> Grammar:
    """The straight-line grammar v_0 -> b, v_1 -> a, v_i -> v_{i-1} v_{i-2}, start v_m."""
    _check_index(m)
    bodies = [[[Symbol.terminal(_LEAF_TERMINAL[0])]], [[Symbol.terminal(_LEAF_TERMINAL[1])]]]
    bodies += [[[Symbol.nonterminal(i - 1), Symbol.nonterminal(i - 2)]] for i in range(2, m + 1)]
    return Grammar.from_bodies(FIB_CLEAN_LETTERS, bodies, [Symbol.nonterminal(m)])


def build_g0(m: int) -> Pcfg:
    return build_g(m, 0)


def build_gk(m: int, k: int) -> Pcfg:
    if k < 1:
        raise InvalidIndex(f"G_k needs k >= 1, got {k}")
    return build_g(m, k)


def add_noise(m: int, noise: NoiseSpec) -> NoisyFibText:
    """
    Alters round(ratio * |Fib_m|) distinct positions of Fib_m.

    Positions are drawn without replacement from numpy's PCG64 generator seeded
    with ``noise.seed``; Type k letters are then drawn uniformly from c_1..c_k
    with the same generator.

    Args:
        m (int): Fibonacci index.
        noise (NoiseSpec): Kind, ratio and seed of the noise.

    Returns:
        NoisyFibText: The noisy text with its sorted altered positions.
    """
    clean = np.frombuffer(fib_string(m), dtype=np.uint8)
    count = noise.altered_count(len(clean))
    rng = np.random.Generator(np.random.PCG64(noise.seed))
    positions = np.sort(rng.choice(len(clean), size=count, replace=False))
    text = clean.copy()
    if noise.kind is NoiseKind.TYPE0:
        flipped = np.where(clean[positions] == ord("a"), ord("b"), ord("a"))
        text[positions] = flipped
    else:
        letters = np.frombuffer(noise.letters, dtype=np.uint8)
        text[positions] = letters[rng.integers(0, noise.k, size=count)]
    logger.debug("added %d noise letters to Fib_%d", count, m)
    return NoisyFibText(m, text.tobytes(), noise, tuple(int(p) for p in positions))


def _letter_table(k: int) -> np.ndarray:
    """Maps a noisy byte to its choice index j, 0 when the byte is not a noise letter."""
    table = np.zeros(256, dtype=np.int64)
    for j, letter in enumerate(noise_letters(k), start=1):
        table[letter] = j
    return table


def choices_for_text(text: bytes, m: int, k: int) -> ChoiceSequence:
    """
    Derivation choices at v_0/v_1 that make G_0 (``k == 0``) or G_k derive ``text``.

    Leaves of the Fibonacci derivation tree appear in text order, so entry i
    is the rule chosen for the leaf at position i.

    Raises:
        LengthMismatch: If ``len(text) != |Fib_m|``.
        IllegalLetter: If a letter has no rule at its leaf.
    """
    clean = np.frombuffer(fib_string(m), dtype=np.uint8)
    noisy = np.frombuffer(bytes(text), dtype=np.uint8)
    if len(noisy) != len(clean):
        raise LengthMismatch(f"text has {len(noisy)} bytes, Fib_{m} has {len(clean)}")
    mismatch = noisy != clean
    if k == 0:
        choices = mismatch.astype(np.int64)
        legal = ~mismatch | (noisy == ord("a")) | (noisy == ord("b"))
    else:
        choices = np.where(mismatch, _letter_table(k)[noisy], 0)
        legal = ~mismatch | (choices > 0)
    if not legal.all():
        position = int(np.argmin(legal))
        raise IllegalLetter(
            f"letter {bytes([noisy[position]])!r} at position {position} "
            f"cannot be derived by G_{k}"
        )
    return tuple(int(c) for c in choices)


def extract_choices(t: NoisyFibText) -> ChoiceSequence:
    return choices_for_text(t.text, t.m, t.noise.grammar_index)


def reconstruct(m: int, k: int, choices: Sequence[int]) -> bytes:
    """
    Decodes a choice sequence back into the noisy text.

    Args:
        m (int): Fibonacci index.
        k (int): Grammar index, 0 for G_0.
        choices (Sequence[int]): One entry per text position, each at most ``max(k, 1)``.

    Returns:
        bytes: The text derived by G_0/G_k with these choices.
    """
    clean = np.frombuffer(fib_string(m), dtype=np.uint8)
    picks = np.asarray(choices, dtype=np.int64)
    if len(picks) != len(clean):
        raise LengthMismatch(f"{len(picks)} choices for a text of length {len(clean)}")
    limit = max(k, 1)
    if len(picks) and (picks.min() < 0 or picks.max() > limit):
        position = int(np.argmax((picks < 0) | (picks > limit)))
        raise ChoiceOutOfRange(f"choice {picks[position]} at position {position} exceeds {limit}")
    if k == 0:
        flipped = np.where(clean == ord("a"), ord("b"), ord("a")).astype(np.uint8)
        text = np.where(picks == 1, flipped, clean)
    else:
        letters = np.concatenate(([0], np.frombuffer(noise_letters(k), dtype=np.uint8)))
        text = np.where(picks > 0, letters[picks], clean)
    return text.astype(np.uint8).tobytes()
