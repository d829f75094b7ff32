from .container import read_artifact, write_artifact
from .rangecoder import FrequencyModel, rc_decode, rc_encode
from .serialization import deserialize_grammar, serialize_grammar
from .unary import doubling_slp, unary_pcfg_compress, unary_pcfg_decompress

__all__ = [
    "FrequencyModel",
    "deserialize_grammar",
    "doubling_slp",
    "rc_decode",
    "rc_encode",
    "read_artifact",
    "serialize_grammar",
    "unary_pcfg_compress",
    "unary_pcfg_decompress",
    "write_artifact",
]
