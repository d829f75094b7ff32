"""
Byte format for Re-Pair shaped grammars.

Layout (all integers LEB128 varints unless noted)::

    |Σ|  terminal bytes (|Σ| raw bytes)
    P    P records of: left right minor-flag(byte) [left' right']
    start-length  start ids

Nonterminal ids ``0..|Σ|-1`` derive the terminal of the same index;
``|Σ|..|Σ|+P-1`` are pair nonterminals in creation order. A pair body may only
refer to ids smaller than its head, which keeps decoded grammars acyclic.
"""

from typing import List

from pcfgcompress.exceptions import MalformedBytes, UnsupportedShape
from pcfgcompress.objects import Grammar, Symbol
from pcfgcompress.utils import ByteReader, put_varint


def _check_shape(g: Grammar) -> int:
    sigma = len(g.terminals)
    if g.nonterminal_count < sigma:
        raise UnsupportedShape("fewer nonterminals than terminals")
    for head in range(sigma):
        rules = g.rules[head]
        if len(rules) != 1 or rules[0].body != (Symbol.terminal(head),):
            raise UnsupportedShape(f"v{head} must be the only rule deriving terminal {head}")
    for head in range(sigma, g.nonterminal_count):
        rules = g.rules[head]
        if not 1 <= len(rules) <= 2:
            raise UnsupportedShape(f"v{head} has {len(rules)} rules, expected one or two")
        for rule in rules:
            if len(rule.body) != 2 or any(s.is_terminal for s in rule.body):
                raise UnsupportedShape(f"{rule!r} is not a pair of nonterminals")
            if any(s.id >= head for s in rule.body):
                raise UnsupportedShape(f"{rule!r} refers to a later nonterminal")
    if not g.start:
        raise UnsupportedShape("empty start sequence")
    for symbol in g.start:
        if symbol.is_terminal or symbol.id >= g.nonterminal_count:
            raise UnsupportedShape(f"start symbol {symbol!r} is not a nonterminal of the grammar")
    return sigma


def serialize_grammar(g: Grammar) -> bytes:
    """
    Serializes a grammar of terminal-lifting rules and binary pair rules.

    Args:
        g (Grammar): The grammar, e.g. the output of ``repair_classic``.

    Returns:
        bytes: The deterministic encoding described in the module docstring.
    """
    sigma = _check_shape(g)
    out = bytearray(put_varint(sigma))
    out += g.terminals
    out += put_varint(g.nonterminal_count - sigma)
    for head in range(sigma, g.nonterminal_count):
        major, *minor = g.rules[head]
        out += put_varint(major.body[0].id) + put_varint(major.body[1].id)
        out.append(1 if minor else 0)
        if minor:
            out += put_varint(minor[0].body[0].id) + put_varint(minor[0].body[1].id)
    out += put_varint(len(g.start))
    for symbol in g.start:
        out += put_varint(symbol.id)
    return bytes(out)


def read_grammar(reader: ByteReader) -> Grammar:
    """Reads one serialized grammar from the reader's current offset."""
    sigma = reader.read_varint()
    terminals = reader.read_bytes(sigma)
    if len(set(terminals)) != sigma:
        raise MalformedBytes("terminal table has duplicates")
    pair_count = reader.read_varint()
    bodies: List[list] = [[[Symbol.terminal(t)]] for t in range(sigma)]

    def read_body(head: int) -> list:
        left, right = reader.read_varint(), reader.read_varint()
        if left >= head or right >= head:
            raise MalformedBytes(f"rule of v{head} refers to v{max(left, right)}")
        return [Symbol.nonterminal(left), Symbol.nonterminal(right)]

    for head in range(sigma, sigma + pair_count):
        head_bodies = [read_body(head)]
        flag = reader.read_byte()
        if flag not in (0, 1):
            raise MalformedBytes(f"minor flag {flag} of v{head} is not 0 or 1")
        if flag:
            head_bodies.append(read_body(head))
        bodies.append(head_bodies)

    start_length = reader.read_varint()
    if start_length == 0:
        raise MalformedBytes("empty start sequence")
    start = []
    for _ in range(start_length):
        v = reader.read_varint()
        if v >= sigma + pair_count:
            raise MalformedBytes(f"start symbol v{v} does not exist")
        start.append(Symbol.nonterminal(v))
    return Grammar.from_bodies(terminals, bodies, start)


def deserialize_grammar(data: bytes) -> Grammar:
    """
    Inverse of ``serialize_grammar``.

    Raises:
        MalformedBytes: If the bytes are truncated, inconsistent or have trailing data.
    """
    reader = ByteReader(data)
    grammar = read_grammar(reader)
    if reader.remaining:
        raise MalformedBytes(f"{reader.remaining} trailing bytes after the grammar")
    return grammar
