CONTAINER_MAGIC = b"PCFG1"

# Range coder registers are this many bits wider than the model total
RC_HEADROOM_BITS = 32

# Frequency models; totals are powers of two or bounded by one
ADAPTIVE_TOTAL_BITS = 16
ADAPTIVE_INITIAL_COUNT = 1
ADAPTIVE_INCREMENT = 32
STATIC_MIN_TOTAL_BITS = 16
STATIC_MAX_TOTAL_BITS = 64
# Bits of resolution kept below the least probable symbol
STATIC_RESOLUTION_BITS = 16

# Fibonacci noise: c_j is byte (NOISE_LETTER_BASE + j - 1) mod 256
NOISE_LETTER_BASE = ord("c")
MAX_NOISE_LETTERS = 254
FIB_CLEAN_LETTERS = b"ba"

DEFAULT_TRIALS = 10
DEFAULT_FIB_INDEX = 20
DEFAULT_TYPE0_RATIOS = (0.0, 0.001, 0.005, 0.01, 0.05, 0.1, 0.15, 0.2)
DEFAULT_TYPE1_RATIOS = DEFAULT_TYPE0_RATIOS
DEFAULT_TYPEK_KS = tuple(range(1, 25))
DEFAULT_TYPEK_RATIO = 0.001

CSV_COLUMNS = (
    "method",
    "noise",
    "ratio",
    "k",
    "seed",
    "original_size",
    "compressed_size",
    "ratio_value",
    "note",
)
