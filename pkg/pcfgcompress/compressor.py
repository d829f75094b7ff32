import logging
from typing import Union

from rich.console import Console
from rich.logging import RichHandler

from pcfgcompress.enums import Method
from pcfgcompress.exceptions import MethodMismatch
from pcfgcompress.methods import (
    FibonacciMethod,
    MethodBase,
    PcfgRepairMethod,
    RepairMethod,
    UnaryMethod,
)
from pcfgcompress.objects import CompressedArtifact

logger = logging.getLogger(__name__)


def set_logger(debug: bool) -> None:
    """Configures debug logging on stderr if requested."""
    level = logging.DEBUG if debug else logging.ERROR
    logging.basicConfig(
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
    )
    package_logger = logging.getLogger("pcfgcompress")
    package_logger.setLevel(level)
    package_logger.propagate = True


class PcfgCompressor:
    """
    Entry point for compressing and decompressing texts with any method.

    Example:
        >>> compressor = PcfgCompressor()
        >>> artifact = compressor.compress(b"abab", Method.REPAIR)
        >>> compressor.decompress(artifact.to_bytes())
        b'abab'
    """

    def __init__(self, debug: bool = False) -> None:
        set_logger(debug)

    @property
    def repair(self) -> RepairMethod:
        return RepairMethod()

    @property
    def pcfg_repair(self) -> PcfgRepairMethod:
        return PcfgRepairMethod()

    @property
    def fib_g0(self) -> FibonacciMethod:
        return FibonacciMethod(Method.FIB_G0)

    @property
    def fib_gk(self) -> FibonacciMethod:
        return FibonacciMethod(Method.FIB_GK)

    @property
    def unary(self) -> UnaryMethod:
        return UnaryMethod()

    def handler(self, method: Union[Method, str]) -> MethodBase:
        """Returns the handler for a method given as enum or CLI name."""
        resolved = method if isinstance(method, Method) else Method.from_cli_name(method)
        if resolved is None:
            raise MethodMismatch(f"unknown method {method!r}")
        return getattr(self, resolved.name.lower())

    def compress(self, text: bytes, method: Union[Method, str], **params) -> CompressedArtifact:
        """
        Compresses ``text`` with ``method``.

        Args:
            text (bytes): The input.
            method (Method | str): Method enum or CLI name such as ``"pcfg-repair"``.
            **params: ``m`` and ``k`` for the Fibonacci methods.

        Returns:
            CompressedArtifact: The artifact; ``to_bytes()`` gives the container.
        """
        return self.handler(method).compress(bytes(text), **params)

    def decompress(self, artifact: Union[CompressedArtifact, bytes]) -> bytes:
        """Decodes an artifact or its container bytes; the method byte selects the decoder."""
        if not isinstance(artifact, CompressedArtifact):
            artifact = CompressedArtifact.from_bytes(artifact)
        return self.handler(artifact.method).decompress(artifact)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}()"


def compress(text: bytes, method: Union[Method, str], **params) -> CompressedArtifact:
    return PcfgCompressor().compress(text, method, **params)


def decompress(artifact: Union[CompressedArtifact, bytes]) -> bytes:
    return PcfgCompressor().decompress(artifact)
