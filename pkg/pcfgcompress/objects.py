import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Mapping, Optional, Sequence, Tuple, Union

from pcfgcompress.constants import (
    DEFAULT_FIB_INDEX,
    DEFAULT_TRIALS,
    DEFAULT_TYPE0_RATIOS,
    DEFAULT_TYPE1_RATIOS,
    DEFAULT_TYPEK_KS,
    DEFAULT_TYPEK_RATIO,
    MAX_NOISE_LETTERS,
    NOISE_LETTER_BASE,
)
from pcfgcompress.enums import Method, NoiseKind, SymbolKind
from pcfgcompress.exceptions import (
    GrammarError,
    InvalidBenchConfig,
    InvalidNoiseSpec,
    RatioOutOfRange,
)
from pcfgcompress.utils import round_half_up

# Rule choices taken at ambiguous heads, in left-most order.
ChoiceSequence = Tuple[int, ...]


@dataclass(frozen=True)
class Symbol:
    """
    A terminal or nonterminal, identified by its index in the owning grammar's table.
    """

    kind: SymbolKind
    id: int

    @classmethod
    def terminal(cls, id: int) -> "Symbol":
        return cls(SymbolKind.TERMINAL, id)

    @classmethod
    def nonterminal(cls, id: int) -> "Symbol":
        return cls(SymbolKind.NONTERMINAL, id)

    @property
    def is_terminal(self) -> bool:
        return self.kind is SymbolKind.TERMINAL

    def __repr__(self) -> str:
        return f"{'t' if self.is_terminal else 'v'}{self.id}"


@dataclass(frozen=True)
class Rule:
    """
    A production ``head -> body``.

    Attributes:
        head: Nonterminal id of the left-hand side.
        body: Right-hand side symbols.
        choice_index: Position of this rule among the rules of its head.
    """

    head: int
    body: Tuple[Symbol, ...]
    choice_index: int = 0

    def __repr__(self) -> str:
        body = " ".join(repr(s) for s in self.body)
        return f"r[{self.head},{self.choice_index}]: v{self.head} -> {body}"


@dataclass(frozen=True)
class Grammar:
    """
    A context-free grammar with a start sequence.

    Nonterminal ``v`` owns the rules in ``rules[v]``; a classic start symbol is
    a start sequence of length one.
    """

    terminals: bytes
    rules: Tuple[Tuple[Rule, ...], ...]
    start: Tuple[Symbol, ...]

    @classmethod
    def from_bodies(
        cls,
        terminals: bytes,
        bodies: Sequence[Sequence[Sequence[Symbol]]],
        start: Sequence[Symbol],
    ) -> "Grammar":
        """
        Builds a grammar from per-nonterminal lists of rule bodies.

        Args:
            terminals: Byte value of each terminal id.
            bodies: ``bodies[v][j]`` is the body of rule ``j`` of nonterminal ``v``.
            start: The start sequence.

        Returns:
            Grammar: Rules numbered by head and position.
        """
        rules = tuple(
            tuple(
                Rule(head, tuple(body), choice)
                for choice, body in enumerate(head_bodies)
            )
            for head, head_bodies in enumerate(bodies)
        )
        return cls(bytes(terminals), rules, tuple(start))

    @property
    def nonterminal_count(self) -> int:
        return len(self.rules)

    @property
    def rule_count(self) -> int:
        return sum(len(r) for r in self.rules)

    @property
    def size(self) -> int:
        """Total length of all rule bodies plus the start sequence."""
        return sum(len(r.body) for rs in self.rules for r in rs) + len(self.start)

    @property
    def is_slg(self) -> bool:
        return all(len(rs) == 1 for rs in self.rules)

    @property
    def is_cnf(self) -> bool:
        for rs in self.rules:
            for rule in rs:
                if len(rule.body) == 1 and rule.body[0].is_terminal:
                    continue
                if len(rule.body) == 2 and not any(s.is_terminal for s in rule.body):
                    continue
                return False
        return len(self.start) == 1 and not self.start[0].is_terminal

    @property
    def ambiguous_heads(self) -> Tuple[int, ...]:
        return tuple(v for v, rs in enumerate(self.rules) if len(rs) > 1)


@dataclass(frozen=True)
class Pcfg:
    """
    A grammar with rule probabilities.

    Explicit probabilities are held as natural logarithms in ``log_probs``
    (aligned with ``grammar.rules``); ``log_probs`` is None for the adaptive
    mode, where the range coder learns the probabilities while coding.
    """

    grammar: Grammar
    log_probs: Optional[Tuple[Tuple[float, ...], ...]] = None

    @classmethod
    def explicit(
        cls,
        grammar: Grammar,
        probs: Union[Mapping[Tuple[int, int], float], Sequence[Sequence[float]]],
    ) -> "Pcfg":
        """
        Creates an explicit PCFG.

        Args:
            grammar: The underlying grammar.
            probs: Either per-head probability lists aligned with the rules, or a
                mapping ``(head, choice_index) -> probability`` where missing
                rules get probability 1.

        Returns:
            Pcfg: The PCFG with probabilities stored in log-space.
        """
        if isinstance(probs, Mapping):
            table = [
                [probs.get((rule.head, rule.choice_index), 1.0) for rule in rs]
                for rs in grammar.rules
            ]
        else:
            table = [list(p) for p in probs]
        if len(table) != grammar.nonterminal_count or any(
            len(p) != len(rs) for p, rs in zip(table, grammar.rules)
        ):
            raise GrammarError("probability table does not match the grammar's rules")

        def to_log(p: float) -> float:
            if not 0.0 <= p <= 1.0:
                raise GrammarError(f"probability {p} outside [0, 1]")
            return math.log(p) if p > 0 else -math.inf

        return cls(grammar, tuple(tuple(to_log(p) for p in row) for row in table))

    @classmethod
    def adaptive(cls, grammar: Grammar) -> "Pcfg":
        return cls(grammar, None)

    @property
    def is_adaptive(self) -> bool:
        return self.log_probs is None


@dataclass(frozen=True)
class NoiseSpec:
    """
    Describes how a Fibonacci string is perturbed.

    Attributes:
        kind: Type 0 (a/b flips) or Type k (substitution by c_1..c_k).
        ratio: Fraction of positions altered, in [0, 1].
        seed: Seed of the PCG64 generator, 0 <= seed < 2**64.
        k: Number of new letters for Type k; ignored for Type 0.
    """

    kind: NoiseKind
    ratio: float
    seed: int = 0
    k: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.ratio <= 1.0:
            raise RatioOutOfRange(f"noise ratio {self.ratio} outside [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise InvalidNoiseSpec(f"seed {self.seed} is not a 64-bit unsigned integer")
        if self.kind is NoiseKind.TYPEK and not 1 <= self.k <= MAX_NOISE_LETTERS:
            raise InvalidNoiseSpec(f"k={self.k} outside 1..{MAX_NOISE_LETTERS}")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "NoiseSpec":
        kind = data["kind"]
        if not isinstance(kind, NoiseKind):
            kind = NoiseKind.from_cli(kind)
        if kind is None:
            raise InvalidNoiseSpec(f"unknown noise kind {data['kind']!r}")
        return cls(kind, float(data.get("ratio", 0.0)), int(data.get("seed", 0)), int(data.get("k", 1)))

    @property
    def grammar_index(self) -> int:
        """0 selects G_0, k selects G_k."""
        return 0 if self.kind is NoiseKind.TYPE0 else self.k

    @property
    def letters(self) -> bytes:
        return noise_letters(self.grammar_index)

    def altered_count(self, length: int) -> int:
        return round_half_up(self.ratio * length)


def noise_letters(k: int) -> bytes:
    """Bytes of c_1..c_k; empty for k = 0."""
    return bytes((NOISE_LETTER_BASE + j) % 256 for j in range(k))


@dataclass(frozen=True)
class NoisyFibText:
    m: int
    text: bytes
    noise: NoiseSpec
    altered_positions: Tuple[int, ...] = ()


@dataclass(frozen=True)
class CompressedArtifact:
    """
    A self-describing compressed text: method, header fields, grammar and payload.
    """

    method: Method
    header: Mapping[str, int] = field(default_factory=dict)
    grammar_bytes: bytes = b""
    payload_bytes: bytes = b""

    def __post_init__(self) -> None:
        object.__setattr__(self, "header", MappingProxyType(dict(self.header)))

    def __hash__(self) -> int:
        return hash((self.method, tuple(sorted(self.header.items())), self.grammar_bytes, self.payload_bytes))

    def to_bytes(self) -> bytes:
        from pcfgcompress.coding.container import write_artifact

        return write_artifact(self)

    @classmethod
    def from_bytes(cls, data: bytes) -> "CompressedArtifact":
        from pcfgcompress.coding.container import read_artifact

        return read_artifact(data)

    @property
    def total_size(self) -> int:
        return len(self.to_bytes())


@dataclass(frozen=True)
class BenchConfig:
    m: int = DEFAULT_FIB_INDEX
    trials: int = DEFAULT_TRIALS
    seed_base: int = 0
    methods: Tuple[Method, ...] = (Method.REPAIR, Method.PCFG_REPAIR, Method.FIB_G0, Method.FIB_GK)
    type0_ratios: Tuple[float, ...] = DEFAULT_TYPE0_RATIOS
    type1_ratios: Tuple[float, ...] = DEFAULT_TYPE1_RATIOS
    typek_ks: Tuple[int, ...] = DEFAULT_TYPEK_KS
    typek_ratio: float = DEFAULT_TYPEK_RATIO
    external: Tuple[str, ...] = ()
    workers: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise InvalidBenchConfig("trials must be at least 1")
        if not self.methods and not self.external:
            raise InvalidBenchConfig("no methods to benchmark")
        ratios = (*self.type0_ratios, *self.type1_ratios, self.typek_ratio)
        if any(not 0.0 <= r <= 1.0 for r in ratios):
            raise InvalidBenchConfig("ratios must lie in [0, 1]")
        if any(not 1 <= k <= MAX_NOISE_LETTERS for k in self.typek_ks):
            raise InvalidBenchConfig(f"k values must lie in 1..{MAX_NOISE_LETTERS}")
        if self.workers < 1:
            raise InvalidBenchConfig("workers must be at least 1")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "BenchConfig":
        """
        Creates a config from parsed TOML; absent keys keep their defaults.

        Args:
            data: Mapping as returned by ``tomllib.load``.

        Returns:
            BenchConfig: The validated configuration.
        """
        kwargs: dict = {}
        for key in ("m", "trials", "seed_base", "workers"):
            if key in data:
                kwargs[key] = int(data[key])
        if "typek_ratio" in data:
            kwargs["typek_ratio"] = float(data["typek_ratio"])
        for key in ("type0_ratios", "type1_ratios"):
            if key in data:
                kwargs[key] = tuple(float(r) for r in data[key])
        if "typek_ks" in data:
            kwargs["typek_ks"] = tuple(int(k) for k in data["typek_ks"])
        if "methods" in data:
            methods = []
            for name in data["methods"]:
                method = Method.from_cli_name(name)
                if method is None or method is Method.UNARY:
                    raise InvalidBenchConfig(f"method {name!r} cannot be benchmarked")
                methods.append(method)
            kwargs["methods"] = tuple(methods)
        if "external" in data:
            external = data["external"]
            if isinstance(external, str):
                external = [e for e in external.split(",") if e]
            kwargs["external"] = tuple(external)
        unknown = set(data) - {
            "m", "trials", "seed_base", "workers", "typek_ratio", "type0_ratios",
            "type1_ratios", "typek_ks", "methods", "external",
        }
        if unknown:
            raise InvalidBenchConfig(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**kwargs)


@dataclass(frozen=True)
class BenchRecord:
    method: str
    noise: str
    ratio: float
    k: int
    seed: Optional[int]
    original_size: int
    compressed_size: Optional[float]
    note: str = ""

    @property
    def ratio_value(self) -> Optional[float]:
        if self.compressed_size is None:
            return None
        return self.compressed_size / self.original_size

    def as_row(self) -> list:
        def blank(value):
            return "" if value is None else value

        return [
            self.method,
            self.noise,
            self.ratio,
            self.k,
            blank(self.seed),
            self.original_size,
            blank(self.compressed_size),
            blank(self.ratio_value),
            self.note,
        ]
