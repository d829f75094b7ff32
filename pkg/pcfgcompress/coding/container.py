"""
Container for compressed texts::

    "PCFG1" · method byte · header · body

FibG0/FibGk: m, k, payload length, payload.
Unary:       n, payload length, payload.
Repair:      serialized grammar.
PcfgRepair:  serialized grammar, flag count, payload length, payload.
"""

from pcfgcompress.constants import CONTAINER_MAGIC
from pcfgcompress.enums import Method
from pcfgcompress.exceptions import MalformedBytes
from pcfgcompress.objects import CompressedArtifact
from pcfgcompress.coding.serialization import read_grammar
from pcfgcompress.utils import ByteReader, put_varint

# Header fields stored before the payload, in order.
HEADER_FIELDS = {
    Method.REPAIR: (),
    Method.PCFG_REPAIR: ("flag_count",),
    Method.FIB_G0: ("m", "k"),
    Method.FIB_GK: ("m", "k"),
    Method.UNARY: ("n",),
}

_GRAMMAR_METHODS = (Method.REPAIR, Method.PCFG_REPAIR)


def write_artifact(artifact: CompressedArtifact) -> bytes:
    out = bytearray(CONTAINER_MAGIC)
    out.append(artifact.method.value)
    if artifact.method in _GRAMMAR_METHODS:
        out += artifact.grammar_bytes
    for name in HEADER_FIELDS[artifact.method]:
        out += put_varint(artifact.header[name])
    if artifact.method is not Method.REPAIR:
        out += put_varint(len(artifact.payload_bytes))
        out += artifact.payload_bytes
    return bytes(out)


def read_artifact(data: bytes) -> CompressedArtifact:
    """
    Parses a container.

    Raises:
        MalformedBytes: On a wrong magic, unknown method byte, truncation or trailing data.
    """
    reader = ByteReader(data)
    if reader.read_bytes(len(CONTAINER_MAGIC)) != CONTAINER_MAGIC:
        raise MalformedBytes("not a PCFG1 container")
    method = Method.parse(reader.read_byte())
    if method is None:
        raise MalformedBytes(f"unknown method byte {data[len(CONTAINER_MAGIC)]}")
    grammar_bytes = b""
    if method in _GRAMMAR_METHODS:
        begin = reader.offset
        read_grammar(reader)
        grammar_bytes = bytes(data[begin : reader.offset])
    header = {name: reader.read_varint() for name in HEADER_FIELDS[method]}
    payload = b""
    if method is not Method.REPAIR:
        payload = reader.read_bytes(reader.read_varint())
    if reader.remaining:
        raise MalformedBytes(f"{reader.remaining} trailing bytes after the payload")
    return CompressedArtifact(method, header, grammar_bytes, payload)
