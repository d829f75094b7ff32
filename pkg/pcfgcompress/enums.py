from enum import Enum


class BetterEnum(Enum):
    @classmethod
    def parse(cls, value):
        try:
            return cls(value)
        except ValueError:
            return None


class SymbolKind(BetterEnum):
    TERMINAL = 0
    NONTERMINAL = 1


# The byte value is what the container stores after the magic.
class Method(BetterEnum):
    REPAIR = 0
    PCFG_REPAIR = 1
    FIB_G0 = 2
    FIB_GK = 3
    UNARY = 4

    @property
    def cli_name(self) -> str:
        return self.name.lower().replace("_", "-")

    @classmethod
    def from_cli_name(cls, name: str):
        for method in cls:
            if method.cli_name == str(name).lower():
                return method
        return None


class NoiseKind(BetterEnum):
    TYPE0 = 0
    TYPEK = 1

    @classmethod
    def from_cli(cls, value):
        """Accepts ``0`` for Type 0 and ``K`` (any case) for Type k."""
        if str(value).upper() == "K":
            return cls.TYPEK
        if str(value) == "0":
            return cls.TYPE0
        return None


class RuleFlag(BetterEnum):
    MAJOR = 0
    MINOR = 1


class ModelMode(BetterEnum):
    ADAPTIVE = 0
    STATIC = 1
