import sys
import tomllib
from functools import wraps
from pathlib import Path

import fire
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from pcfgcompress.bench import run_bench, summarize, tool_version, write_csv
from pcfgcompress.compressor import PcfgCompressor
from pcfgcompress.enums import Method, NoiseKind
from pcfgcompress.exceptions import ConflictingOptions, InvalidBenchConfig, InvalidNoiseSpec, PcfgCompressException
from pcfgcompress.fibonacci import add_noise, fib_length
from pcfgcompress.objects import BenchConfig, NoiseSpec
from pcfgcompress.utils import pretty_print_size

con = Console(markup=True)
err = Console(markup=True, stderr=True)


def reports_errors(func):
    """Prints library and IO errors on stderr and exits with status 1."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (PcfgCompressException, OSError) as e:
            err.print(f"[red bold]ERROR[/red bold]: {type(e).__name__}: {escape(str(e))}")
            sys.exit(1)

    return wrapper


def _path(kwargs: dict, name: str) -> Path:
    if kwargs.get(name) is None:
        raise FileNotFoundError(f"--{name} PATH is required")
    return Path(str(kwargs[name]))


@reports_errors
def gen(m: int, out: str, noise="0", k: int = 1, ratio: float = 0.0, seed: int = 0) -> None:
    """
    Write a noisy Fibonacci string as raw bytes.
    --noise 0 flips a/b, --noise K substitutes one of k extra letters.
    """
    kind = NoiseKind.from_cli(noise)
    if kind is None:
        raise InvalidNoiseSpec(f"noise must be 0 or K, got {noise!r}")
    noisy = add_noise(int(m), NoiseSpec(kind, float(ratio), int(seed), int(k)))
    Path(out).write_bytes(noisy.text)
    con.print(
        f"Wrote {pretty_print_size(len(noisy.text))} to {out}, "
        f"{len(noisy.altered_positions)} positions altered"
    )


@reports_errors
def compress(method: str, out: str, m: int = None, k: int = 1, n: int = None, debug: bool = False, **kwargs) -> None:
    """
    Compress a file: --method {repair|pcfg-repair|fib-g0|fib-gk|unary} --in PATH --out PATH.
    --m/--k for the Fibonacci methods. unary takes --in or --n, not both.
    """
    compressor = PcfgCompressor(debug=debug)
    handler = compressor.handler(method)
    if n is not None:
        if handler.method is not Method.UNARY:
            raise ConflictingOptions(f"--n only applies to unary, not {method}")
        if kwargs.get("in") is not None:
            raise ConflictingOptions("unary takes either --in or --n, not both")
        artifact = handler.compress(n=int(n))
        original_size = int(n)
    else:
        text = _path(kwargs, "in").read_bytes()
        artifact = handler.compress(text, m=m, k=k)
        original_size = len(text)
    data = artifact.to_bytes()
    Path(out).write_bytes(data)
    con.print(
        f"{artifact.method.cli_name}: {pretty_print_size(original_size)} -> "
        f"{pretty_print_size(len(data))} ({len(data) / max(original_size, 1):.4f})"
    )


@reports_errors
def decompress(out: str, debug: bool = False, **kwargs) -> None:
    """
    Decompress a container: --in PATH --out PATH.
    """
    source = _path(kwargs, "in")
    text = PcfgCompressor(debug=debug).decompress(source.read_bytes())
    Path(out).write_bytes(text)
    con.print(f"Wrote {pretty_print_size(len(text))} to {out}")


@reports_errors
def bench(config: str, csv: str, external=None, debug: bool = False) -> None:
    """
    Run the compression-ratio sweeps from a TOML config and write the CSV.
    --external gzip,bzip2 adds external baselines.
    """
    PcfgCompressor(debug=debug)
    with open(config, "rb") as f:
        try:
            data = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise InvalidBenchConfig(f"{config}: {e}") from e
    if external is not None:
        data["external"] = list(external) if isinstance(external, (list, tuple)) else str(external)
    bench_config = BenchConfig.from_dict(data)

    records = run_bench(bench_config, show_progress=True)
    write_csv(records, csv, {tool: tool_version(tool) for tool in bench_config.external})

    table = Table("Method", "Noise", "k", "Ratio", "Mean size", "Mean ratio", title=f"Fib_{bench_config.m} averages")
    for (method, noise, k), points in summarize(records).items():
        for ratio, size in points:
            table.add_row(method, noise, str(k), f"{ratio:g}", f"{size:.1f}", f"{size / fib_length(bench_config.m):.4f}")
    con.print(table)
    for record in records:
        if record.note == "missing":
            err.print(f"[bold red]WARNING[/bold red]: {record.method} not found, no rows written for it")
    con.print(f"Wrote {len(records)} rows to {csv}")


cli_map = {
    "gen": gen,
    "compress": compress,
    "decompress": decompress,
    "bench": bench,
}


def main() -> None:
    fire.Fire(cli_map)


if __name__ == "__main__":
    main()
