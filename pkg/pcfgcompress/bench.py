"""
Compression-ratio sweeps over noisy Fibonacci strings.

Every (noise point, trial) pair regenerates its text from ``seed_base + trial``
so each row can be reproduced on its own. A compressed size is recorded only
after the round trip has been checked byte for byte.
"""

import csv
import logging
import shutil
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import groupby
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from rich.progress import Progress

from pcfgcompress.compressor import PcfgCompressor
from pcfgcompress.constants import CSV_COLUMNS
from pcfgcompress.enums import Method, NoiseKind
from pcfgcompress.exceptions import BenchError, ExternalToolMissing
from pcfgcompress.fibonacci import add_noise, fib_length
from pcfgcompress.objects import BenchConfig, BenchRecord, NoiseSpec

logger = logging.getLogger(__name__)

EXTERNAL_ARGS = {
    "gzip": (["-c", "-9"], ["-d", "-c"]),
    "bzip2": (["-c", "-9"], ["-d", "-c"]),
    "xz": (["-c", "-9"], ["-d", "-c"]),
}


@dataclass(frozen=True)
class SweepPoint:
    kind: NoiseKind
    ratio: float
    k: int = 1

    @property
    def noise_label(self) -> str:
        return "0" if self.kind is NoiseKind.TYPE0 else "K"

    @property
    def grammar_index(self) -> int:
        return 0 if self.kind is NoiseKind.TYPE0 else self.k

    def noise(self, seed: int) -> NoiseSpec:
        return NoiseSpec(self.kind, self.ratio, seed, self.k)


def sweep_points(config: BenchConfig) -> List[SweepPoint]:
    """Type 0 ratio sweep, Type 1 ratio sweep, then the Type k sweep at a fixed ratio."""
    points = [SweepPoint(NoiseKind.TYPE0, r) for r in config.type0_ratios]
    points += [SweepPoint(NoiseKind.TYPEK, r, 1) for r in config.type1_ratios]
    points += [SweepPoint(NoiseKind.TYPEK, config.typek_ratio, k) for k in config.typek_ks]
    return list(dict.fromkeys(points))


def applies(method: Method, point: SweepPoint) -> bool:
    if method is Method.FIB_G0:
        return point.kind is NoiseKind.TYPE0
    if method is Method.FIB_GK:
        return point.kind is NoiseKind.TYPEK
    return method in (Method.REPAIR, Method.PCFG_REPAIR)


def run_external(tool: str, text: bytes) -> int:
    """
    Compresses ``text`` with an external command and returns the output size.

    Raises:
        ExternalToolMissing: If ``tool`` is not on PATH.
        BenchError: If the tool fails or does not round-trip.
    """
    path = shutil.which(tool)
    if path is None:
        raise ExternalToolMissing(f"{tool} not found on PATH")
    pack_args, unpack_args = EXTERNAL_ARGS.get(tool, (["-c"], ["-d", "-c"]))
    try:
        packed = subprocess.run([path, *pack_args], input=text, capture_output=True, check=True).stdout
        unpacked = subprocess.run([path, *unpack_args], input=packed, capture_output=True, check=True).stdout
    except subprocess.CalledProcessError as e:
        raise BenchError(f"{tool} failed: {e.stderr.decode(errors='replace').strip()}") from e
    if unpacked != text:
        raise BenchError(f"{tool} did not reproduce its input")
    return len(packed)


def tool_version(tool: str) -> Optional[str]:
    path = shutil.which(tool)
    if path is None:
        return None
    try:
        result = subprocess.run(
            [path, "--version"], input=b"", capture_output=True, timeout=10
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    lines = (result.stdout or result.stderr).decode(errors="replace").strip().splitlines()
    return lines[0].strip() if lines else "unknown"


@dataclass(frozen=True)
class _Trial:
    config: BenchConfig
    point: SweepPoint
    trial: int
    tools: Tuple[str, ...]


def run_trial(task: _Trial) -> Dict[str, int]:
    """Compressed size per method (and available external tool) for one noisy text."""
    config, point = task.config, task.point
    seed = config.seed_base + task.trial
    noisy = add_noise(config.m, point.noise(seed))
    compressor = PcfgCompressor(debug=logger.isEnabledFor(logging.DEBUG))
    sizes = {}
    for method in config.methods:
        if not applies(method, point):
            continue
        artifact = compressor.compress(noisy.text, method, m=config.m, k=max(point.k, 1))
        data = artifact.to_bytes()
        if compressor.decompress(data) != noisy.text:
            raise BenchError(
                f"{method.cli_name} failed to round-trip noise {point.noise_label} "
                f"ratio {point.ratio} k {point.k} seed {seed}"
            )
        sizes[method.cli_name] = len(data)
    for tool in task.tools:
        sizes[tool] = run_external(tool, noisy.text)
    logger.debug("trial %d of %s done: %s", task.trial, point, sizes)
    return sizes


def _mean_record(group: List[BenchRecord]) -> BenchRecord:
    first = group[0]
    mean = float(np.mean([r.compressed_size for r in group]))
    return BenchRecord(first.method, first.noise, first.ratio, first.k, None, first.original_size, mean, "mean")


def run_bench(config: BenchConfig, show_progress: bool = False) -> List[BenchRecord]:
    """
    Runs every sweep point ``config.trials`` times.

    Returns:
        List[BenchRecord]: Trial rows followed by their mean, grouped by method
        and sweep point in configuration order; a warning row for every missing
        external tool comes last.
    """
    points = sweep_points(config)
    available = tuple(t for t in config.external if shutil.which(t) is not None)
    missing = [t for t in config.external if t not in available]
    for tool in missing:
        logger.warning("%s not found on PATH, skipping it", tool)
    tasks = [_Trial(config, point, trial, available) for point in points for trial in range(config.trials)]

    results: List[Dict[str, int]] = []
    with Progress(disable=not show_progress) as prog:
        task_id = prog.add_task("Compressing", total=len(tasks))
        if config.workers > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                for sizes in pool.map(run_trial, tasks):
                    results.append(sizes)
                    prog.update(task_id, advance=1)
        else:
            for task in tasks:
                prog.update(task_id, description=f"Noise {task.point.noise_label} ratio {task.point.ratio} k {task.point.k}")
                results.append(run_trial(task))
                prog.update(task_id, advance=1)

    original_size = fib_length(config.m)
    names = [m.cli_name for m in config.methods] + list(available)
    records: List[BenchRecord] = []
    for name in names:
        for point_index, point in enumerate(points):
            group = []
            for trial in range(config.trials):
                sizes = results[point_index * config.trials + trial]
                if name not in sizes:
                    continue
                group.append(
                    BenchRecord(
                        name, point.noise_label, point.ratio, point.grammar_index,
                        config.seed_base + trial, original_size, sizes[name],
                    )
                )
            if group:
                records.extend(group)
                records.append(_mean_record(group))
    for tool in missing:
        records.append(BenchRecord(tool, "", 0.0, 0, None, original_size, None, "missing"))
    return records


def write_csv(records: Iterable[BenchRecord], path, versions: Dict[str, Optional[str]] = None) -> None:
    """
    Writes records as CSV; external tool versions go into leading ``#`` comment lines.
    """
    with Path(path).open("w", newline="") as f:
        for tool, version in (versions or {}).items():
            f.write(f"# {tool}: {version or 'missing'}\n")
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for record in records:
            writer.writerow(record.as_row())


def summarize(records: Iterable[BenchRecord]) -> Dict[Tuple[str, str, int], List[Tuple[float, float]]]:
    """Mean compressed size per (method, noise, k) as a list of (ratio, mean size) points."""
    means = [r for r in records if r.note == "mean"]
    summary = {}
    for key, group in groupby(means, key=lambda r: (r.method, r.noise, r.k)):
        summary.setdefault(key, []).extend((r.ratio, r.compressed_size) for r in group)
    return summary
