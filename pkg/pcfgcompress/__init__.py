from .compressor import PcfgCompressor, compress, decompress

__all__ = ["PcfgCompressor", "compress", "decompress"]
