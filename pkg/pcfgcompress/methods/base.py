import logging
from typing import Mapping

from pcfgcompress.enums import Method
from pcfgcompress.exceptions import MethodMismatch
from pcfgcompress.objects import CompressedArtifact

logger = logging.getLogger(__name__)


class MethodBase:
    """Shared plumbing for the compression methods."""

    method: Method

    def _artifact(
        self,
        header: Mapping[str, int] = None,
        grammar_bytes: bytes = b"",
        payload_bytes: bytes = b"",
    ) -> CompressedArtifact:
        """Wraps the parts of a compressed text and logs their sizes."""
        artifact = CompressedArtifact(self.method, dict(header or {}), grammar_bytes, payload_bytes)
        logger.debug(
            "%s: header %s, grammar %d bytes, payload %d bytes",
            self.method.cli_name,
            dict(artifact.header),
            len(grammar_bytes),
            len(payload_bytes),
        )
        return artifact

    def _check_method(self, artifact: CompressedArtifact) -> None:
        if artifact.method is not self.method:
            raise MethodMismatch(
                f"{self.method.cli_name} cannot decode a {artifact.method.cli_name} artifact"
            )

    def compress(self, text: bytes, **params) -> CompressedArtifact:
        raise NotImplementedError

    def decompress(self, artifact: CompressedArtifact) -> bytes:
        raise NotImplementedError
