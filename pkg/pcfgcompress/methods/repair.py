import logging

from pcfgcompress.coding.rangecoder import FrequencyModel, rc_decode, rc_encode
from pcfgcompress.coding.serialization import deserialize_grammar, serialize_grammar
from pcfgcompress.enums import Method
from pcfgcompress.grammar import expand
from pcfgcompress.methods.base import MethodBase
from pcfgcompress.objects import CompressedArtifact
from pcfgcompress.repair import repair_classic, repair_pcfg

# Major/minor flags share one adaptive binary model.
FLAG_MODEL = FrequencyModel.adaptive(2)

logger = logging.getLogger(__name__)


class RepairMethod(MethodBase):
    """
    Plain Re-Pair: the straight-line grammar is the whole artifact.
    """

    method = Method.REPAIR

    def compress(self, text: bytes, **params) -> CompressedArtifact:
        grammar = repair_classic(text)
        logger.debug("re-pair grammar: %d rules, size %d", grammar.rule_count, grammar.size)
        return self._artifact(grammar_bytes=serialize_grammar(grammar))

    def decompress(self, artifact: CompressedArtifact) -> bytes:
        self._check_method(artifact)
        return expand(deserialize_grammar(artifact.grammar_bytes))


class PcfgRepairMethod(MethodBase):
    """
    Re-Pair with major/minor rules; the major/minor flags of the derivation
    are range coded after the grammar.
    """

    method = Method.PCFG_REPAIR

    def compress(self, text: bytes, **params) -> CompressedArtifact:
        grammar, flags = repair_pcfg(text)
        logger.debug(
            "pcfg re-pair grammar: %d rules, size %d, %d flags", grammar.rule_count, grammar.size, len(flags)
        )
        payload = rc_encode(flags, FLAG_MODEL) if flags else b""
        return self._artifact({"flag_count": len(flags)}, serialize_grammar(grammar), payload)

    def decompress(self, artifact: CompressedArtifact) -> bytes:
        self._check_method(artifact)
        grammar = deserialize_grammar(artifact.grammar_bytes)
        flags = rc_decode(artifact.payload_bytes, FLAG_MODEL, artifact.header["flag_count"])
        return expand(grammar, flags)
