"""Left-most derivations over grammars and PCFGs."""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from pcfgcompress.exceptions import (
    ChoiceOutOfRange,
    ChoiceUnderflow,
    EmptyDerivation,
    ProbabilityModeError,
    UnknownRule,
)
from pcfgcompress.objects import ChoiceSequence, Grammar, Pcfg, Rule, Symbol

logger = logging.getLogger(__name__)

PROBABILITY_TOLERANCE = 1e-9


def _select(g: Grammar, head: int, choices: Sequence[int], position: int) -> Tuple[Rule, int]:
    """Picks the rule for ``head``; returns it and the next choice position."""
    if not 0 <= head < len(g.rules):
        raise UnknownRule(f"nonterminal v{head} is not in the grammar")
    rules = g.rules[head]
    if not rules:
        raise EmptyDerivation(f"nonterminal v{head} has no rules")
    if len(rules) == 1:
        return rules[0], position
    if position >= len(choices):
        raise ChoiceUnderflow(
            f"choice sequence exhausted after {position} entries while expanding v{head}"
        )
    choice = choices[position]
    if not 0 <= choice < len(rules):
        raise ChoiceOutOfRange(
            f"choice {choice} at entry {position} but v{head} has {len(rules)} rules"
        )
    return rules[choice], position + 1


def expand(g: Grammar, choices: Sequence[int] = ()) -> bytes:
    """
    Derives the terminal string selected by a choice sequence.

    Nonterminals are expanded depth-first, left to right, starting from the
    start sequence; every head with more than one rule consumes the next entry
    of ``choices``. Entries beyond the ones needed are left unread.

    Args:
        g (Grammar): The grammar.
        choices (Sequence[int]): Rule choices at ambiguous heads in left-most order.

    Returns:
        bytes: The derived text.
    """
    out = bytearray()
    terminals = g.terminals
    stack: List[Symbol] = list(reversed(g.start))
    position = 0
    while stack:
        symbol = stack.pop()
        if symbol.is_terminal:
            out.append(terminals[symbol.id])
            continue
        rule, position = _select(g, symbol.id, choices, position)
        stack.extend(reversed(rule.body))
    return bytes(out)


def full_derivation(g: Grammar, choices: Sequence[int] = ()) -> List[Rule]:
    """
    Rebuilds the complete left-most derivation, unambiguous steps included.

    Args:
        g (Grammar): The grammar.
        choices (Sequence[int]): Rule choices at ambiguous heads in left-most order.

    Returns:
        List[Rule]: Every rule application in left-most order.
    """
    derivation = []
    stack: List[Symbol] = list(reversed(g.start))
    position = 0
    while stack:
        symbol = stack.pop()
        if symbol.is_terminal:
            continue
        rule, position = _select(g, symbol.id, choices, position)
        derivation.append(rule)
        stack.extend(reversed(rule.body))
    return derivation


def extract_choices_from_derivation(g: Grammar, derivation: Iterable[Rule]) -> ChoiceSequence:
    """Keeps the choice indices of the rules applied at ambiguous heads."""
    choices = []
    for rule in derivation:
        _check_rule(g, rule)
        if len(g.rules[rule.head]) > 1:
            choices.append(rule.choice_index)
    return tuple(choices)


def string_of_derivation(g: Grammar, derivation: Sequence[Rule]) -> bytes:
    """
    Applies a rule sequence left-most, starting from the start sequence.

    Raises:
        UnknownRule: If a rule does not belong to ``g`` or does not rewrite the
            left-most nonterminal.
    """
    out = bytearray()
    stack: List[Symbol] = list(reversed(g.start))
    steps = iter(derivation)
    while stack:
        symbol = stack.pop()
        if symbol.is_terminal:
            out.append(g.terminals[symbol.id])
            continue
        rule = next(steps, None)
        if rule is None:
            raise UnknownRule(f"derivation ends before v{symbol.id} is rewritten")
        _check_rule(g, rule)
        if rule.head != symbol.id:
            raise UnknownRule(f"{rule!r} does not rewrite the left-most nonterminal v{symbol.id}")
        stack.extend(reversed(rule.body))
    if next(steps, None) is not None:
        raise UnknownRule("derivation has rules left after the text is complete")
    return bytes(out)


def _check_rule(g: Grammar, rule: Rule) -> None:
    if not 0 <= rule.head < len(g.rules):
        raise UnknownRule(f"{rule!r}: no nonterminal v{rule.head}")
    rules = g.rules[rule.head]
    if not 0 <= rule.choice_index < len(rules) or rules[rule.choice_index] != rule:
        raise UnknownRule(f"{rule!r} is not a rule of the grammar")


def derivation_log_probability(p: Pcfg, derivation: Iterable[Rule]) -> float:
    """Natural-log probability of a derivation under an explicit PCFG."""
    if p.is_adaptive:
        raise ProbabilityModeError("an adaptive PCFG has no explicit rule probabilities")
    logs = []
    for rule in derivation:
        _check_rule(p.grammar, rule)
        logs.append(p.log_probs[rule.head][rule.choice_index])
    if any(value == -math.inf for value in logs):
        return -math.inf
    return math.fsum(logs)


def derivation_probability(p: Pcfg, derivation: Iterable[Rule]) -> float:
    """
    Probability of a derivation: the product of its rule probabilities.

    Args:
        p (Pcfg): A PCFG with explicit probabilities.
        derivation (Iterable[Rule]): Rules of the grammar of ``p``.

    Returns:
        float: The product, 1.0 for an empty derivation.
    """
    return math.exp(derivation_log_probability(p, derivation))


@dataclass(frozen=True)
class Violation:
    """A broken grammar or PCFG invariant."""

    head: Optional[int]
    detail: str = ""

    def __str__(self) -> str:
        where = "start sequence" if self.head is None else f"v{self.head}"
        return f"{self.__class__.__name__}({where}){': ' + self.detail if self.detail else ''}"


class EmptyBody(Violation):
    pass


class SymbolOutOfBounds(Violation):
    pass


class NoRules(Violation):
    pass


class ChoiceIndexMismatch(Violation):
    pass


class EmptyStart(Violation):
    pass


class ProbSumViolation(Violation):
    pass


class ProbTableMismatch(Violation):
    pass


def _symbol_in_bounds(g: Grammar, symbol: Symbol) -> bool:
    bound = len(g.terminals) if symbol.is_terminal else len(g.rules)
    return 0 <= symbol.id < bound


def validate(g: Union[Grammar, Pcfg]) -> List[Violation]:
    """
    Checks the grammar invariants, and for an explicit PCFG the per-head sums.

    Args:
        g (Grammar | Pcfg): The grammar or PCFG to check.

    Returns:
        List[Violation]: Empty when every invariant holds.
    """
    pcfg = g if isinstance(g, Pcfg) else None
    grammar = pcfg.grammar if pcfg is not None else g
    violations: List[Violation] = []

    if not grammar.start:
        violations.append(EmptyStart(None, "start sequence is empty"))
    for symbol in grammar.start:
        if not _symbol_in_bounds(grammar, symbol):
            violations.append(SymbolOutOfBounds(None, f"{symbol!r}"))

    for head, rules in enumerate(grammar.rules):
        if not rules:
            violations.append(NoRules(head))
        for position, rule in enumerate(rules):
            if rule.head != head or rule.choice_index != position:
                violations.append(
                    ChoiceIndexMismatch(head, f"rule at position {position} is {rule!r}")
                )
            if not rule.body:
                violations.append(EmptyBody(head, f"rule {position}"))
            for symbol in rule.body:
                if not _symbol_in_bounds(grammar, symbol):
                    violations.append(SymbolOutOfBounds(head, f"{symbol!r} in rule {position}"))

    if pcfg is not None and not pcfg.is_adaptive:
        if len(pcfg.log_probs) != len(grammar.rules):
            violations.append(ProbTableMismatch(None, "one probability row per nonterminal"))
        for head, (rules, logs) in enumerate(zip(grammar.rules, pcfg.log_probs)):
            if len(logs) != len(rules):
                violations.append(ProbTableMismatch(head))
                continue
            total = math.fsum(math.exp(value) for value in logs)
            if rules and abs(total - 1.0) > PROBABILITY_TOLERANCE:
                violations.append(ProbSumViolation(head, f"probabilities sum to {total}"))

    if violations:
        logger.debug("grammar has %d violations", len(violations))
    return violations
