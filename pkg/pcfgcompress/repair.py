"""
Re-Pair and its PCFG variant with major/minor rules.

Both constructions lift every terminal ``a`` to a nonterminal ``v_a`` (ids
``0..|Σ|-1`` in first-use order) and then repeatedly replace the most frequent
bigram by a fresh nonterminal (ids from ``|Σ|`` in creation order). The PCFG
variant additionally gives the fresh nonterminal a minor rule for a rare bigram
that differs from the major one in a single terminal-lifting position.

Bigram counts are left-to-right and non-overlapping, so a run of ``L`` equal
tokens holds ``L // 2`` occurrences of the doubled bigram.
"""

import heapq
import logging
from collections import Counter, defaultdict
from itertools import groupby
from typing import Dict, Iterator, List, Optional, Set, Tuple, Type

from pcfgcompress.enums import RuleFlag
from pcfgcompress.exceptions import EmptyInput, RepairError, RuleMissing
from pcfgcompress.objects import Grammar, Symbol

logger = logging.getLogger(__name__)

Bigram = Tuple[int, int]
# Non-overlapping left-to-right occurrence count per bigram.
BigramStats = Dict[Bigram, int]
# Derivation subtree abbreviated by one token: (head, choice_index, left, right).
# Terminal-lifting tokens are leaves with no children.
Node = Tuple[int, int, Optional["Node"], Optional["Node"]]


class _SequenceBase:
    """
    Grammar under construction plus the working sequence it abbreviates.

    Subclasses store the sequence; this class keeps the rules and the
    terminal-lifting layout.
    """

    def __init__(self, text: bytes) -> None:
        if not text:
            raise EmptyInput("cannot build a grammar for an empty text")
        self.terminals = bytes(dict.fromkeys(text))
        self._lift = {byte: v for v, byte in enumerate(self.terminals)}
        # rules[v - |Σ|] lists the bodies of pair nonterminal v: [major, minor?]
        self.pair_rules: List[List[Bigram]] = []

    def is_lifted(self, symbol: int) -> bool:
        """True for members of V_Σ."""
        return symbol < len(self.terminals)

    def new_nonterminal(self, body: Bigram) -> int:
        self.pair_rules.append([body])
        return len(self.terminals) + len(self.pair_rules) - 1

    def add_minor_rule(self, head: int, body: Bigram) -> None:
        bodies = self.pair_rules[head - len(self.terminals)]
        if len(bodies) != 1:
            raise RuleMissing(f"v{head} already has a minor rule")
        bodies.append(body)

    def rule_count(self, head: int) -> int:
        if self.is_lifted(head):
            return 1
        return len(self.pair_rules[head - len(self.terminals)])

    def _check_rule(self, bigram: Bigram, head: int, flag: RuleFlag) -> None:
        index = head - len(self.terminals)
        if not 0 <= index < len(self.pair_rules):
            raise RuleMissing(f"v{head} is not a pair nonterminal")
        bodies = self.pair_rules[index]
        if flag.value >= len(bodies) or bodies[flag.value] != tuple(bigram):
            raise RuleMissing(f"v{head} has no {flag.name.lower()} rule for {bigram}")

    def _leaf(self, byte: int) -> Tuple[int, Node]:
        v = self._lift[byte]
        return v, (v, 0, None, None)

    def to_grammar(self) -> Grammar:
        lifted = [[[Symbol.terminal(t)]] for t in range(len(self.terminals))]
        pairs = [
            [[Symbol.nonterminal(x), Symbol.nonterminal(y)] for x, y in bodies]
            for bodies in self.pair_rules
        ]
        start = [Symbol.nonterminal(v) for v in self.tokens()]
        return Grammar.from_bodies(self.terminals, lifted + pairs, start)

    def flags(self) -> List[int]:
        """
        Choice indices of every node whose head has a minor rule, in pre-order.

        These are exactly the choices ``expand`` consumes for the final grammar.
        """
        flags = []
        stack = list(reversed(self.trees()))
        while stack:
            head, choice, left, right = stack.pop()
            if left is None:
                continue
            if self.rule_count(head) > 1:
                flags.append(choice)
            stack.append(right)
            stack.append(left)
        return flags

    def flatten(self) -> bytes:
        """Text abbreviated by the annotation trees, for checking text preservation."""
        out = bytearray()
        stack = list(reversed(self.trees()))
        while stack:
            head, _, left, right = stack.pop()
            if left is None:
                out.append(self.terminals[head])
                continue
            stack.append(right)
            stack.append(left)
        return bytes(out)

    # Storage interface

    def tokens(self) -> List[int]:
        raise NotImplementedError

    def trees(self) -> List[Node]:
        raise NotImplementedError

    def count(self, bigram: Bigram) -> int:
        raise NotImplementedError

    def bigram_stats(self) -> BigramStats:
        raise NotImplementedError

    def max_bigram(self) -> Optional[Bigram]:
        raise NotImplementedError

    def replace(self, bigram: Bigram, head: int, flag: RuleFlag = RuleFlag.MAJOR) -> int:
        raise NotImplementedError

    def neighbours(self, symbol: int) -> Iterator[Tuple[Optional[int], Optional[Bigram]]]:
        """For each occurrence of ``symbol``: the token before it and the bigram after it."""
        raise NotImplementedError


class NaiveWorkingSequence(_SequenceBase):
    """Reference storage: a plain list rescanned on every query."""

    def __init__(self, text: bytes) -> None:
        super().__init__(text)
        leaves = [self._leaf(byte) for byte in text]
        self._tokens = [v for v, _ in leaves]
        self._trees = [node for _, node in leaves]

    def tokens(self) -> List[int]:
        return list(self._tokens)

    def trees(self) -> List[Node]:
        return list(self._trees)

    def bigram_stats(self) -> BigramStats:
        counts = Counter(zip(self._tokens, self._tokens[1:]))
        for symbol, run in groupby(self._tokens):
            length = sum(1 for _ in run)
            if length > 1:
                counts[(symbol, symbol)] -= (length - 1) - length // 2
        return counts

    def count(self, bigram: Bigram) -> int:
        return self.bigram_stats().get(tuple(bigram), 0)

    def max_bigram(self) -> Optional[Bigram]:
        counts = self.bigram_stats()
        best = min(counts.items(), key=lambda item: (-item[1], item[0]), default=None)
        if best is None or best[1] < 2:
            return None
        return best[0]

    def replace(self, bigram: Bigram, head: int, flag: RuleFlag = RuleFlag.MAJOR) -> int:
        self._check_rule(bigram, head, flag)
        x, y = bigram
        tokens, trees = [], []
        replaced = 0
        i = 0
        while i < len(self._tokens):
            if i + 1 < len(self._tokens) and self._tokens[i] == x and self._tokens[i + 1] == y:
                tokens.append(head)
                trees.append((head, flag.value, self._trees[i], self._trees[i + 1]))
                replaced += 1
                i += 2
            else:
                tokens.append(self._tokens[i])
                trees.append(self._trees[i])
                i += 1
        self._tokens, self._trees = tokens, trees
        return replaced

    def neighbours(self, symbol: int) -> Iterator[Tuple[Optional[int], Optional[Bigram]]]:
        tokens = self._tokens
        for i, token in enumerate(tokens):
            if token != symbol:
                continue
            before = tokens[i - 1] if i > 0 else None
            after = (tokens[i + 1], tokens[i + 2]) if i + 2 < len(tokens) else None
            yield before, after


class WorkingSequence(_SequenceBase):
    """
    Incremental storage for Re-Pair.

    Tokens live in a doubly linked list over their original text positions.
    Every adjacent pair is indexed by its left position; a max-heap with lazy
    deletion keyed on ``(-count, bigram)`` yields the most frequent bigram with
    ties going to the smallest pair. Counts are refreshed only for bigrams
    touched since the last query.
    """

    def __init__(self, text: bytes) -> None:
        super().__init__(text)
        leaves = [self._leaf(byte) for byte in text]
        size = len(leaves)
        self._tok: List[Optional[int]] = [v for v, _ in leaves]
        self._tree: List[Optional[Node]] = [node for _, node in leaves]
        self._next = list(range(1, size)) + [-1]
        self._prev = list(range(-1, size - 1))
        self._head = 0
        self._occ: Dict[Bigram, Set[int]] = defaultdict(set)
        self._where: Dict[int, Set[int]] = defaultdict(set)
        self._count: Dict[Bigram, int] = {}
        self._dirty: Set[Bigram] = set()
        self._heap: List[Tuple[int, Bigram]] = []
        for i, v in enumerate(self._tok):
            self._where[v].add(i)
            if i + 1 < size:
                self._add((v, self._tok[i + 1]), i)

    def _add(self, bigram: Bigram, position: int) -> None:
        self._occ[bigram].add(position)
        self._dirty.add(bigram)

    def _remove(self, bigram: Bigram, position: int) -> None:
        positions = self._occ.get(bigram)
        if positions is not None:
            positions.discard(position)
            if not positions:
                del self._occ[bigram]
        self._dirty.add(bigram)

    def _positions(self) -> Iterator[int]:
        i = self._head
        while i != -1:
            yield i
            i = self._next[i]

    def tokens(self) -> List[int]:
        return [self._tok[i] for i in self._positions()]

    def trees(self) -> List[Node]:
        return [self._tree[i] for i in self._positions()]

    def count(self, bigram: Bigram) -> int:
        positions = self._occ.get(tuple(bigram))
        if not positions:
            return 0
        if bigram[0] != bigram[1]:
            return len(positions)
        # Overlapping occurrences inside a run: keep every other one.
        count = 0
        last_right = -1
        for p in sorted(positions):
            if p == last_right:
                continue
            count += 1
            last_right = self._next[p]
        return count

    def bigram_stats(self) -> BigramStats:
        return {bigram: count for bigram in self._occ if (count := self.count(bigram))}

    def max_bigram(self) -> Optional[Bigram]:
        for bigram in self._dirty:
            count = self.count(bigram)
            if count:
                self._count[bigram] = count
            else:
                self._count.pop(bigram, None)
            if count >= 2:
                heapq.heappush(self._heap, (-count, bigram))
        self._dirty.clear()
        while self._heap:
            negative, bigram = self._heap[0]
            if self._count.get(bigram, 0) == -negative:
                return bigram
            heapq.heappop(self._heap)
        return None

    def replace(self, bigram: Bigram, head: int, flag: RuleFlag = RuleFlag.MAJOR) -> int:
        self._check_rule(bigram, head, flag)
        bigram = tuple(bigram)
        tok, nxt, prv = self._tok, self._next, self._prev
        replaced = 0
        for p in sorted(self._occ.get(bigram, ())):
            if p not in self._occ.get(bigram, ()):
                continue
            q = nxt[p]
            before, after = prv[p], nxt[q]
            if before != -1:
                self._remove((tok[before], tok[p]), before)
            if after != -1:
                self._remove((tok[q], tok[after]), q)
            self._remove(bigram, p)
            self._where[tok[p]].discard(p)
            self._where[tok[q]].discard(q)

            tok[p] = head
            self._tree[p] = (head, flag.value, self._tree[p], self._tree[q])
            tok[q] = None
            self._tree[q] = None
            nxt[p] = after
            if after != -1:
                prv[after] = p
            self._where[head].add(p)

            if before != -1:
                self._add((tok[before], head), before)
            if after != -1:
                self._add((head, tok[after]), p)
            replaced += 1
        return replaced

    def neighbours(self, symbol: int) -> Iterator[Tuple[Optional[int], Optional[Bigram]]]:
        tok, nxt, prv = self._tok, self._next, self._prev
        for p in sorted(self._where.get(symbol, ())):
            before = tok[prv[p]] if prv[p] != -1 else None
            q = nxt[p]
            r = nxt[q] if q != -1 else -1
            after = (tok[q], tok[r]) if r != -1 else None
            yield before, after


def find_max_bigram(T: _SequenceBase) -> Optional[Bigram]:
    """The most frequent bigram if it occurs at least twice, else None."""
    return T.max_bigram()


def replace(T: _SequenceBase, b: Bigram, v: int, flag: RuleFlag = RuleFlag.MAJOR) -> _SequenceBase:
    """Replaces the left-to-right, non-overlapping occurrences of ``b`` by ``v``."""
    T.replace(b, v, flag)
    return T


def find_max_context(T: _SequenceBase, v_b: int) -> Optional[int]:
    """
    The symbol found most often immediately before an occurrence of ``v_b``.

    Returns None when no occurrence has a predecessor; ties go to the smaller id.
    """
    contexts = Counter(before for before, _ in T.neighbours(v_b) if before is not None)
    if not contexts:
        return None
    return min(contexts.items(), key=lambda item: (-item[1], item[0]))[0]


def find_min_bigram(T: _SequenceBase, c: int, b: Bigram, v_b: Optional[int] = None) -> Optional[Bigram]:
    """
    The least frequent bigram right after ``c`` that differs from ``b`` in one V_Σ position.

    A candidate ``(x', y')`` satisfies ``x' == x`` with ``y'`` in V_Σ, or
    ``y' == y`` with ``x'`` in V_Σ; it must differ from ``b`` and must not
    contain ``v_b``. Counts only include occurrences right after ``c``.
    """
    x, y = b
    candidates: Counter = Counter()
    for _, after in T.neighbours(c):
        if after is None or after == tuple(b):
            continue
        first, second = after
        if v_b is not None and v_b in after:
            continue
        if (first == x and T.is_lifted(second)) or (second == y and T.is_lifted(first)):
            candidates[after] += 1
    if not candidates:
        return None
    return min(candidates.items(), key=lambda item: (item[1], item[0]))[0]


def _construct(
    text: bytes, with_minor: bool, storage: Type[_SequenceBase], check: bool
) -> _SequenceBase:
    T = storage(text)
    iteration = 0
    while (b := find_max_bigram(T)) is not None:
        v_b = T.new_nonterminal(b)
        replaced = T.replace(b, v_b, RuleFlag.MAJOR)
        minor = None
        if with_minor:
            c = find_max_context(T, v_b)
            if c is not None:
                minor = find_min_bigram(T, c, b, v_b)
            if minor is not None:
                T.add_minor_rule(v_b, minor)
                T.replace(minor, v_b, RuleFlag.MINOR)
        logger.debug(
            "iteration %d: v%d -> %s (x%d)%s",
            iteration, v_b, b, replaced, f", minor {minor}" if minor else "",
        )
        if check and T.flatten() != text:
            raise RepairError(f"text not preserved after iteration {iteration}")
        iteration += 1
    return T


def repair_classic(text: bytes, naive: bool = False, check: bool = False) -> Grammar:
    """
    Builds a straight-line grammar with Re-Pair.

    Args:
        text (bytes): Non-empty input.
        naive (bool): Use the rescanning reference storage.
        check (bool): Verify text preservation after every iteration.

    Returns:
        Grammar: Every head has one rule; the start sequence is the final working sequence.
    """
    storage = NaiveWorkingSequence if naive else WorkingSequence
    return _construct(bytes(text), False, storage, check).to_grammar()


def repair_pcfg(text: bytes, naive: bool = False, check: bool = False) -> Tuple[Grammar, List[int]]:
    """
    Builds a grammar with major/minor rule pairs and the matching flag sequence.

    Each iteration replaces the most frequent bigram ``b`` by a fresh ``v_b``
    (major rule). It then looks up the most frequent context ``c`` of ``v_b``
    and the rarest bigram after ``c`` that differs from ``b`` in one
    terminal-lifting position; if there is one it becomes the minor rule of
    ``v_b`` and is replaced too.

    Returns:
        Tuple[Grammar, List[int]]: The grammar (choice 0 = major, 1 = minor) and
        the flags, i.e. the choices that make ``expand`` reproduce ``text``.
    """
    storage = NaiveWorkingSequence if naive else WorkingSequence
    T = _construct(bytes(text), True, storage, check)
    return T.to_grammar(), T.flags()
