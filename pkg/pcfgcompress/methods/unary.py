from pcfgcompress.coding.unary import unary_pcfg_compress, unary_pcfg_decompress
from pcfgcompress.enums import Method
from pcfgcompress.exceptions import EmptyInput, IllegalLetter
from pcfgcompress.methods.base import MethodBase
from pcfgcompress.objects import CompressedArtifact


class UnaryMethod(MethodBase):
    method = Method.UNARY

    def compress(self, text: bytes = None, n: int = None, **params) -> CompressedArtifact:
        """Compresses a^n, given either as the text itself or as its length ``n``."""
        if text is not None:
            stray = bytes(text).replace(b"a", b"")
            if stray:
                raise IllegalLetter(f"unary texts contain only 'a', found {stray[:1]!r}")
            n = len(text)
        if n is None:
            raise EmptyInput("unary needs the text or its length n")
        artifact = unary_pcfg_compress(n)
        return self._artifact(artifact.header, payload_bytes=artifact.payload_bytes)

    def decompress(self, artifact: CompressedArtifact) -> bytes:
        self._check_method(artifact)
        return unary_pcfg_decompress(artifact)
