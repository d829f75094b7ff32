import math

import numpy as np
import pytest

from pcfgcompress import PcfgCompressor
from pcfgcompress.coding import (
    FrequencyModel,
    deserialize_grammar,
    doubling_slp,
    rc_decode,
    rc_encode,
    serialize_grammar,
    unary_pcfg_compress,
    unary_pcfg_decompress,
)
from pcfgcompress.coding.rangecoder import ideal_bits
from pcfgcompress.coding.unary import unary_pcfg
from pcfgcompress.enums import Method, NoiseKind
from pcfgcompress.exceptions import (
    IllegalLetter,
    InvalidModel,
    MalformedBytes,
    MethodMismatch,
    SymbolOutOfRange,
    TruncatedStream,
    UnsupportedShape,
)
from pcfgcompress.fibonacci import add_noise, fib_string, fibonacci_slp
from pcfgcompress.grammar import derivation_probability, expand, full_derivation
from pcfgcompress.objects import CompressedArtifact, Grammar, NoiseSpec, Symbol
from pcfgcompress.repair import repair_classic, repair_pcfg
from pcfgcompress.utils import ByteReader, put_varint


def test_varints():
    assert put_varint(0) == b"\x00"
    assert put_varint(127) == b"\x7f"
    assert put_varint(300) == b"\xac\x02"
    reader = ByteReader(put_varint(300) + put_varint(2**40) + b"\x05")
    assert reader.read_varint() == 300
    assert reader.read_varint() == 2**40
    assert reader.read_byte() == 5
    assert reader.remaining == 0
    with pytest.raises(MalformedBytes):
        ByteReader(b"\x80").read_varint()
    with pytest.raises(ValueError):
        put_varint(-1)


def test_empty_stream():
    model = FrequencyModel.adaptive(2)
    data = rc_encode([], model)
    assert len(data) <= 8
    assert rc_decode(data, model, 0) == []


def test_long_run_of_zeros_is_tiny():
    model = FrequencyModel.adaptive(2)
    data = rc_encode([0] * 10946, model)
    assert len(data) < 32
    assert rc_decode(data, model, 10946) == [0] * 10946


@pytest.mark.parametrize("alphabet", [2, 3, 9, 256])
def test_adaptive_round_trip(alphabet):
    rng = np.random.default_rng(alphabet)
    symbols = [int(s) for s in rng.integers(0, alphabet, size=3000)]
    model = FrequencyModel.adaptive(alphabet)
    assert rc_decode(rc_encode(symbols, model), model, len(symbols)) == symbols


def test_static_coding_stays_within_ideal_bound():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        size = int(rng.integers(2, 17))
        probs = [float(p) for p in rng.dirichlet(np.ones(size))]
        model = FrequencyModel.static(probs)
        symbols = [int(s) for s in rng.choice(size, size=int(rng.integers(1, 600)), p=probs)]
        data = rc_encode(symbols, model)
        assert len(data) * 8 <= ideal_bits(symbols, probs) + 64
        assert rc_decode(data, model, len(symbols)) == symbols


@pytest.mark.parametrize("m", [17, 20, 26, 40])
def test_sharp_static_models_keep_their_probabilities(m):
    probs = [1.0 - 2.0**-m, 2.0**-m]
    model = FrequencyModel.static(probs)
    assert model.probability(0) == probs[0]
    assert model.probability(1) == probs[1]
    symbols = [0] * 5000 + [1] + [0] * 5000
    data = rc_encode(symbols, model)
    assert len(data) * 8 <= ideal_bits(symbols, probs) + 64
    assert rc_decode(data, model, len(symbols)) == symbols


def test_static_model_quantization():
    model = FrequencyModel.static([0.0, 1.0])
    assert model.freqs[0] == 1
    assert sum(model.freqs) == 2**16
    assert FrequencyModel.static([1 - 2.0**-30, 2.0**-30]).total_bits == 46
    capped = FrequencyModel.static([1 - 2.0**-60, 2.0**-60])
    assert capped.total_bits == 64
    assert capped.freqs == (2**64 - 16, 16)
    with pytest.raises(InvalidModel):
        FrequencyModel.static([1.0])
    with pytest.raises(InvalidModel):
        FrequencyModel.static([0.5, 0.6])
    with pytest.raises(InvalidModel):
        FrequencyModel.adaptive(1)


def test_coder_errors():
    model = FrequencyModel.adaptive(4)
    with pytest.raises(SymbolOutOfRange):
        rc_encode([0, 4], model)
    symbols = [int(s) for s in np.random.default_rng(7).integers(0, 4, size=1000)]
    data = rc_encode(symbols, model)
    with pytest.raises(TruncatedStream):
        rc_decode(data[: len(data) // 2], model, len(symbols))


@pytest.mark.parametrize("seed", range(8))
def test_grammar_serialization_round_trip(seed):
    rng = np.random.default_rng(seed)
    text = rng.choice(np.frombuffer(b"xyz!", dtype=np.uint8), size=int(rng.integers(1, 300))).tobytes()
    for g in (repair_classic(text), repair_pcfg(text)[0]):
        data = serialize_grammar(g)
        assert serialize_grammar(deserialize_grammar(data)) == data
        assert deserialize_grammar(data) == g


def test_fibonacci_slp_serializes_small():
    data = serialize_grammar(fibonacci_slp(20))
    assert len(data) <= 128
    assert expand(deserialize_grammar(data)) == fib_string(20)


def test_serialization_rejects_bad_shapes():
    a = Symbol.terminal(0)
    with pytest.raises(UnsupportedShape):
        serialize_grammar(Grammar.from_bodies(b"a", [[[a]]], []))
    with pytest.raises(UnsupportedShape):
        serialize_grammar(Grammar.from_bodies(b"a", [[[a, a]]], [Symbol.nonterminal(0)]))


def test_deserialization_rejects_bad_bytes():
    data = serialize_grammar(repair_classic(b"abab"))
    with pytest.raises(MalformedBytes):
        deserialize_grammar(data + b"\x00")
    with pytest.raises(MalformedBytes):
        deserialize_grammar(data[:-1])
    # v2 -> v2 v1 refers to itself
    with pytest.raises(MalformedBytes):
        deserialize_grammar(b"\x02ab\x01\x02\x01\x00\x01\x02")


@pytest.mark.parametrize("n", [1, 2, 3, 2**10])
def test_unary_round_trip(n):
    artifact = unary_pcfg_compress(n)
    assert unary_pcfg_decompress(artifact) == b"a" * n
    assert PcfgCompressor().decompress(artifact.to_bytes()) == b"a" * n
    if n == 2**10:
        assert artifact.total_size <= 24


def test_unary_size_grows_with_log_n():
    ms = np.arange(8, 21)
    artifacts = [unary_pcfg_compress(2 ** int(m)) for m in ms]
    for m, artifact in zip(ms, artifacts):
        assert len(artifact.payload_bytes) * 8 <= int(m) + 2 + 64
    bits = np.array([artifact.total_size * 8 for artifact in artifacts])
    slope, intercept = np.polyfit(ms, bits, 1)
    assert slope <= 16
    assert np.max(np.abs(bits - (slope * ms + intercept))) <= 32
    slp_size = len(serialize_grammar(doubling_slp(20)))
    assert bits[-1] // 8 < slp_size
    assert expand(doubling_slp(5)) == b"a" * 32


@pytest.mark.slow
@pytest.mark.parametrize("m", [22, 24, 26])
def test_unary_stays_logarithmic_for_long_runs(m):
    n = 2**m
    artifact = unary_pcfg_compress(n)
    ideal = math.ceil(math.log2(n) - (n - 1) * math.log2(1 - 1 / n))
    assert ideal == m + 2
    assert len(artifact.payload_bytes) * 8 <= ideal + 64
    assert artifact.total_size < len(serialize_grammar(doubling_slp(m)))


def test_unary_method_accepts_text_or_length():
    compressor = PcfgCompressor()
    assert compressor.compress(b"aaaa", Method.UNARY).header["n"] == 4
    assert compressor.unary.compress(n=7).header["n"] == 7
    with pytest.raises(IllegalLetter):
        compressor.compress(b"aab", Method.UNARY)


def test_container_round_trips():
    compressor = PcfgCompressor()
    text = add_noise(10, NoiseSpec(NoiseKind.TYPEK, 0.05, seed=1, k=3)).text
    artifacts = [
        compressor.compress(text, "repair"),
        compressor.compress(text, "pcfg-repair"),
        compressor.compress(text, "fib-gk", m=10, k=3),
        compressor.compress(fib_string(10), "fib-g0", m=10),
        unary_pcfg_compress(100),
    ]
    for artifact in artifacts:
        data = artifact.to_bytes()
        assert data.startswith(b"PCFG1")
        assert CompressedArtifact.from_bytes(data) == artifact


def test_container_rejects_bad_bytes():
    data = PcfgCompressor().compress(b"abcabc", "pcfg-repair").to_bytes()
    with pytest.raises(MalformedBytes):
        CompressedArtifact.from_bytes(b"PCFG2" + data[5:])
    with pytest.raises(MalformedBytes):
        CompressedArtifact.from_bytes(data[:5] + b"\x09" + data[6:])
    with pytest.raises(MalformedBytes):
        CompressedArtifact.from_bytes(data + b"\x00")
    with pytest.raises(MalformedBytes):
        CompressedArtifact.from_bytes(data[:-1])


def test_decoder_checks_method():
    artifact = unary_pcfg_compress(5)
    with pytest.raises(MethodMismatch):
        PcfgCompressor().repair.decompress(artifact)


def test_fib_g0_on_clean_fib20():
    compressor = PcfgCompressor()
    data = compressor.compress(fib_string(20), Method.FIB_G0, m=20).to_bytes()
    assert len(data) < 64
    assert compressor.decompress(data) == fib_string(20)


@pytest.mark.slow
@pytest.mark.parametrize("case", range(200))
def test_universal_round_trip(case):
    rng = np.random.default_rng(10_000 + case)
    m = int(rng.integers(5, 21))
    kind, k = [(NoiseKind.TYPE0, 1), (NoiseKind.TYPEK, 1), (NoiseKind.TYPEK, 8)][case % 3]
    noisy = add_noise(m, NoiseSpec(kind, float(rng.uniform(0, 0.2)), seed=case, k=k))
    fib_method = Method.FIB_G0 if kind is NoiseKind.TYPE0 else Method.FIB_GK
    compressor = PcfgCompressor()
    for method in (Method.REPAIR, Method.PCFG_REPAIR, fib_method):
        data = compressor.compress(noisy.text, method, m=m, k=k).to_bytes()
        assert compressor.decompress(data) == noisy.text


def test_unary_pcfg_probability():
    p = unary_pcfg(4)
    derivation = full_derivation(p.grammar, [0, 0, 0, 1])
    assert len(derivation) == 4
    assert derivation_probability(p, derivation) == pytest.approx(0.75**3 * 0.25, rel=1e-12)


def test_artifacts_are_immutable_and_hashable():
    artifact = PcfgCompressor().compress(b"abcabcab", "pcfg-repair")
    same = CompressedArtifact.from_bytes(artifact.to_bytes())
    assert hash(artifact) == hash(same)
    assert len({artifact, same, unary_pcfg_compress(5)}) == 2
    with pytest.raises(TypeError):
        artifact.header["flag_count"] = 7
