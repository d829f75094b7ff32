from collections import Counter
from itertools import groupby

import numpy as np
import pytest

from pcfgcompress.enums import NoiseKind, RuleFlag
from pcfgcompress.exceptions import EmptyInput, RuleMissing
from pcfgcompress.fibonacci import add_noise, fib_string
from pcfgcompress.grammar import expand
from pcfgcompress.objects import NoiseSpec
from pcfgcompress.repair import (
    NaiveWorkingSequence,
    WorkingSequence,
    find_max_bigram,
    find_max_context,
    find_min_bigram,
    repair_classic,
    repair_pcfg,
    replace,
)

STORAGES = [NaiveWorkingSequence, WorkingSequence]


def non_overlapping_counts(tokens):
    counts = Counter(zip(tokens, tokens[1:]))
    for symbol, run in groupby(tokens):
        length = len(list(run))
        if length > 1:
            counts[(symbol, symbol)] -= (length - 1) - length // 2
    return counts


def random_text(rng, alphabet=b"abcd", low=1, high=400):
    size = int(rng.integers(low, high))
    return rng.choice(np.frombuffer(alphabet, dtype=np.uint8), size=size).tobytes()


@pytest.mark.parametrize("storage", STORAGES)
def test_replace_run_of_five(storage):
    T = storage(b"aaaaa")
    v = T.new_nonterminal((0, 0))
    replace(T, (0, 0), v)
    assert T.tokens() == [v, v, 0]
    assert T.flatten() == b"aaaaa"


@pytest.mark.parametrize("storage", STORAGES)
def test_max_bigram(storage):
    assert find_max_bigram(storage(b"abab")) == (0, 1)
    assert storage(b"abab").count((0, 1)) == 2
    assert find_max_bigram(storage(b"abc")) is None
    assert storage(b"aaaaa").count((0, 0)) == 2
    assert find_max_bigram(storage(b"aaa")) is None


@pytest.mark.parametrize("storage", STORAGES)
def test_max_bigram_ties_take_smallest_pair(storage):
    # (a,b), (b,c) and (c,a) all occur twice
    T = storage(b"abcabca")
    assert find_max_bigram(T) == (0, 1)


@pytest.mark.parametrize("storage", STORAGES)
def test_context_and_min_bigram(storage):
    T = storage(b"cabcabcax")
    v = T.new_nonterminal((1, 2))
    T.replace((1, 2), v)
    assert T.tokens() == [0, v, 0, v, 0, 1, 3]
    c = find_max_context(T, v)
    assert c == 0
    assert find_min_bigram(T, c, (1, 2), v) == (1, 3)


@pytest.mark.parametrize("storage", STORAGES)
def test_min_bigram_none_without_candidates(storage):
    T = storage(b"cabcab")
    v = T.new_nonterminal((1, 2))
    T.replace((1, 2), v)
    assert find_max_context(T, v) == 0
    assert find_min_bigram(T, 0, (1, 2), v) is None
    assert find_max_context(storage(b"ab"), 0) is None


@pytest.mark.parametrize("storage", STORAGES)
def test_max_context_ties_take_smaller_id(storage):
    # a v b v: both contexts seen once
    T = storage(b"axybxy")
    v = T.new_nonterminal((1, 2))
    T.replace((1, 2), v)
    assert T.tokens() == [0, v, 3, v]
    assert find_max_context(T, v) == 0

    T = storage(b"axybxybxy")
    v = T.new_nonterminal((1, 2))
    T.replace((1, 2), v)
    assert find_max_context(T, v) == 3


@pytest.mark.parametrize("storage", STORAGES)
def test_min_bigram_prefers_the_rarest_candidate(storage):
    # after c: (a, d) three times, (a, e) once
    T = storage(b"cabcabcab" + b"cad" * 3 + b"cae")
    v = T.new_nonterminal((1, 2))
    T.replace((1, 2), v)
    assert find_max_context(T, v) == 0
    assert find_min_bigram(T, 0, (1, 2), v) == (1, 4)


@pytest.mark.parametrize("storage", STORAGES)
def test_replace_needs_a_rule(storage):
    T = storage(b"abab")
    with pytest.raises(RuleMissing):
        T.replace((0, 1), 2)
    v = T.new_nonterminal((0, 1))
    with pytest.raises(RuleMissing):
        T.replace((1, 0), v, RuleFlag.MINOR)


def test_classic_small_inputs():
    g = repair_classic(b"abab")
    assert [s.id for s in g.start] == [2, 2]
    assert g.rule_count == 3
    assert g.size == 6
    assert expand(g) == b"abab"

    single = repair_classic(b"a")
    assert single.rule_count == 1
    assert expand(single) == b"a"

    with pytest.raises(EmptyInput):
        repair_classic(b"")


@pytest.mark.parametrize("seed", range(10))
def test_start_sequence_has_no_repeated_bigram(seed):
    text = random_text(np.random.default_rng(seed))
    for g in (repair_classic(text), repair_pcfg(text)[0]):
        counts = non_overlapping_counts([s.id for s in g.start])
        assert not counts or max(counts.values()) < 2


@pytest.mark.parametrize("seed", range(20))
def test_naive_and_incremental_agree(seed):
    rng = np.random.default_rng(seed)
    text = random_text(rng, alphabet=b"ab" if seed % 2 else b"abcde")
    assert repair_classic(text, naive=True) == repair_classic(text)
    assert repair_pcfg(text, naive=True) == repair_pcfg(text)


@pytest.mark.parametrize("seed", range(10))
def test_initial_counts_agree(seed):
    text = random_text(np.random.default_rng(100 + seed), alphabet=b"aab")
    naive, fast = NaiveWorkingSequence(text), WorkingSequence(text)
    expected = non_overlapping_counts(naive.tokens())
    for bigram, count in expected.items():
        assert naive.count(bigram) == fast.count(bigram) == count
    assert naive.max_bigram() == fast.max_bigram()


@pytest.mark.parametrize("storage", STORAGES)
def test_stats_follow_replacements(storage):
    T = storage(random_text(np.random.default_rng(77), alphabet=b"ab", low=200, high=201))
    for _ in range(6):
        b = find_max_bigram(T)
        if b is None:
            break
        T.replace(b, T.new_nonterminal(b))
        assert dict(T.bigram_stats()) == dict(non_overlapping_counts(T.tokens()))


@pytest.mark.parametrize("seed", range(15))
def test_pcfg_repair_decodes(seed):
    rng = np.random.default_rng(200 + seed)
    text = random_text(rng, alphabet=b"abc" if seed % 3 else b"ab")
    g, flags = repair_pcfg(text, check=True)
    assert expand(g, flags) == text
    assert set(flags) <= {0, 1}
    assert expand(repair_classic(text, check=True)) == text


@pytest.mark.parametrize("naive", [True, False])
def test_pcfg_repair_adds_minor_rule(naive):
    # "ab" is replaced first; its usual context "x" is also followed once by "ad"
    text = b"abxabyabxabxad"
    g, flags = repair_pcfg(text, naive=naive)
    v = len(g.terminals)
    assert [[s.id for s in r.body] for r in g.rules[v]] == [[0, 1], [0, 4]]
    assert flags[-1] == 1
    assert expand(g, flags) == text


@pytest.mark.parametrize("seed", range(50))
def test_pcfg_repair_equals_classic_without_minor_rules(seed):
    rng = np.random.default_rng(300 + seed)
    word = rng.permutation(np.frombuffer(b"abcdefgh", dtype=np.uint8))[: int(rng.integers(2, 9))].tobytes()
    text = word * int(rng.integers(2, 20))
    g, flags = repair_pcfg(text)
    assert g.is_slg
    assert flags == []
    assert g == repair_classic(text)


def test_rule_count_grows_linearly_on_fibonacci_strings():
    for m in range(8, 19):
        g = repair_classic(fib_string(m))
        assert expand(g) == fib_string(m)
        assert g.rule_count <= 2 * m + 8


def test_pcfg_repair_on_type1_noisy_fibonacci():
    noisy = add_noise(20, NoiseSpec(NoiseKind.TYPEK, 0.001, seed=3, k=1))
    g, flags = repair_pcfg(noisy.text)
    c1 = g.terminals.index(ord("c"))
    minor = [rules[1] for rules in g.rules if len(rules) == 2]
    assert len(minor) == 5
    assert sum(any(s.id == c1 for s in rule.body) for rule in minor) == 2
    assert len(flags) >= 5
    assert expand(g, flags) == noisy.text
    assert repair_pcfg(noisy.text, naive=True) == (g, flags)
