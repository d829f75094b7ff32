from pcfgcompress.coding.rangecoder import FrequencyModel, rc_decode, rc_encode
from pcfgcompress.enums import Method
from pcfgcompress.exceptions import InvalidIndex, MalformedBytes
from pcfgcompress.fibonacci import choices_for_text, fib_length, reconstruct
from pcfgcompress.methods.base import MethodBase
from pcfgcompress.objects import CompressedArtifact


class FibonacciMethod(MethodBase):
    """
    Noisy Fibonacci strings under G_0 or G_k.

    Both sides know the grammar family, so only ``(m, k)`` and the range-coded
    choices at v_0/v_1 are stored.
    """

    def __init__(self, method: Method = Method.FIB_G0):
        self.method = method

    def _grammar_index(self, k: int) -> int:
        return 0 if self.method is Method.FIB_G0 else k

    def compress(self, text: bytes, m: int = None, k: int = 1, **params) -> CompressedArtifact:
        """
        Args:
            text (bytes): A noisy Fib_m.
            m (int): Fibonacci index.
            k (int): Number of noise letters for G_k; FibG0 always stores 1.

        Raises:
            IllegalLetter: If ``text`` is not derivable by the grammar.
        """
        if m is None:
            raise InvalidIndex(f"{self.method.cli_name} needs the Fibonacci index m")
        if self.method is Method.FIB_G0:
            k = 1
        elif k < 1:
            raise InvalidIndex(f"G_k needs k >= 1, got {k}")
        choices = choices_for_text(text, m, self._grammar_index(k))
        payload = rc_encode(choices, FrequencyModel.adaptive(k + 1))
        return self._artifact({"m": m, "k": k}, payload_bytes=payload)

    def decompress(self, artifact: CompressedArtifact) -> bytes:
        self._check_method(artifact)
        m, k = artifact.header["m"], artifact.header["k"]
        if m < 2 or k < 1:
            raise MalformedBytes(f"invalid grammar parameters m={m}, k={k}")
        choices = rc_decode(artifact.payload_bytes, FrequencyModel.adaptive(k + 1), fib_length(m))
        return reconstruct(m, self._grammar_index(k), choices)
