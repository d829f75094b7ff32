"""
PCFG compression of the unary string a^n with the two rules S -> aS | a.

The derivation is r_0^(n-1) r_1, coded with the static probabilities
(1 - 1/n, 1/n); for n = 2^m these are (1 - 2^-m, 2^-m) and the whole artifact
grows with log n. ``doubling_slp`` is the straight-line grammar
v_{i+1} -> v_i v_i the construction is compared against.
"""

import logging
from itertools import chain, repeat

from pcfgcompress.coding.rangecoder import FrequencyModel, rc_decode, rc_encode
from pcfgcompress.enums import Method
from pcfgcompress.exceptions import EmptyInput, MalformedBytes, MethodMismatch
from pcfgcompress.grammar import expand
from pcfgcompress.objects import CompressedArtifact, Grammar, Pcfg, Symbol

logger = logging.getLogger(__name__)


def unary_grammar() -> Grammar:
    a, S = Symbol.terminal(0), Symbol.nonterminal(0)
    return Grammar.from_bodies(b"a", [[[a, S], [a]]], [S])


def unary_probabilities(n: int) -> tuple:
    return (1.0 - 1.0 / n, 1.0 / n)


def unary_pcfg(n: int) -> Pcfg:
    return Pcfg.explicit(unary_grammar(), [unary_probabilities(n)])


def unary_model(n: int) -> FrequencyModel:
    return FrequencyModel.static(unary_probabilities(n))


def unary_choices(n: int):
    return chain(repeat(0, n - 1), (1,))


def unary_pcfg_compress(n: int) -> CompressedArtifact:
    """
    Compresses a^n as the choice sequence of its unique derivation.

    Args:
        n (int): Run length, at least 1.

    Returns:
        CompressedArtifact: Method ``UNARY`` with header ``n`` and the coded choices.
    """
    if n < 1:
        raise EmptyInput(f"run length must be positive, got {n}")
    payload = rc_encode(unary_choices(n), unary_model(n))
    logger.debug("a^%d coded in %d payload bytes", n, len(payload))
    return CompressedArtifact(Method.UNARY, {"n": n}, b"", payload)


def unary_pcfg_decompress(artifact: CompressedArtifact) -> bytes:
    if artifact.method is not Method.UNARY:
        raise MethodMismatch(f"expected a unary artifact, got {artifact.method.name}")
    n = artifact.header["n"]
    if n < 1:
        raise MalformedBytes("unary artifact with n = 0")
    choices = rc_decode(artifact.payload_bytes, unary_model(n), n)
    text = expand(unary_grammar(), choices)
    if len(text) != n:
        raise MalformedBytes(f"payload derives {len(text)} letters, header says {n}")
    return text


def doubling_slp(m: int) -> Grammar:
    """The SLP v_0 -> a, v_{i+1} -> v_i v_i with start v_m, deriving a^(2^m)."""
    bodies = [[[Symbol.terminal(0)]]]
    bodies += [[[Symbol.nonterminal(i), Symbol.nonterminal(i)]] for i in range(m)]
    return Grammar.from_bodies(b"a", bodies, [Symbol.nonterminal(m)])
