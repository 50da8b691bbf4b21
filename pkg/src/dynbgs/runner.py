"""Sequence-level drivers used by the CLI: run, evaluate, bench."""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from .config import PipelineConfig
from .evaluation import Confusion, MetricsRow, accumulate, metrics
from .frame_io import (
    FrameIOError,
    SequenceSpec,
    default_mask_extension,
    ensure_writable_dir,
    gt_paths,
    load_sequence,
    mask_filename,
    prefetch,
    read_gt,
    sequence_length,
    write_mask,
)
from .pipeline import Pipeline


class MissingGroundTruthError(FrameIOError):
    pass


@dataclass
class RunStats:
    frames: int = 0
    width: int = 0
    height: int = 0
    channels: int = 0
    seed: int = 0
    foreground_pixels: int = 0
    frame_ms: List[float] = field(default_factory=list)
    wall_s: float = 0.0
    digest: "hashlib._Hash" = field(default_factory=hashlib.sha256)

    def observe(self, result, frame_shape) -> None:
        self.frames += 1
        self.height, self.width, self.channels = frame_shape
        self.foreground_pixels += int(np.count_nonzero(result.final))
        self.frame_ms.append(result.elapsed_ms)
        self.digest.update(result.final.tobytes())

    def summary(self) -> Dict[str, object]:
        """Deterministic facts about the run (no timings)."""
        return {
            "frames": self.frames,
            "width": self.width,
            "height": self.height,
            "channels": self.channels,
            "seed": self.seed,
            "foreground_pixels": self.foreground_pixels,
            "mask_sha256": self.digest.hexdigest(),
        }

    def timing(self) -> Dict[str, object]:
        ms = np.asarray(self.frame_ms) if self.frame_ms else np.zeros(1)
        pipeline_s = ms.sum() / 1000.0
        return {
            "frames": self.frames,
            "mean_ms": round(float(ms.mean()), 3),
            "median_ms": round(float(np.median(ms)), 3),
            "p95_ms": round(float(np.percentile(ms, 95)), 3),
            "fps_pipeline": round(self.frames / pipeline_s, 3) if pipeline_s > 0 else 0.0,
            "fps_with_io": round(self.frames / self.wall_s, 3) if self.wall_s > 0 else 0.0,
        }


def format_kv(values: Dict[str, object]) -> str:
    return "".join(f"{k}={v}\n" for k, v in values.items())


def run_frames(frames: Iterable[np.ndarray], config: PipelineConfig, threads: int = 1,
               out_dir: Optional[Path] = None, mask_ext: Optional[str] = None,
               dump_state_every: int = 0, on_result=None) -> RunStats:
    """Drive the pipeline over frames; optionally write masks and state dumps."""
    pipeline = Pipeline(config, threads=threads)
    stats = RunStats(seed=config.seed)
    ext = mask_ext or default_mask_extension()
    start = time.perf_counter()
    for frame in frames:
        result = pipeline.process_frame(frame)
        stats.observe(result, pipeline.model.shape)
        if out_dir is not None:
            write_mask(result.final, out_dir / mask_filename(result.index, ext))
            if dump_state_every and result.index % dump_state_every == 0:
                pipeline.dump_state(out_dir / "state" / f"frame{result.index:06d}")
        if on_result is not None:
            on_result(result)
    stats.wall_s = time.perf_counter() - start
    return stats


def run(spec: SequenceSpec, config: PipelineConfig, out_dir, threads: int = 1,
        mask_ext: Optional[str] = None, dump_state_every: int = 0) -> RunStats:
    """Write bin%06d masks, summary.txt (deterministic) and timing.txt."""
    out_dir = ensure_writable_dir(out_dir)
    frames = prefetch(load_sequence(spec))
    stats = run_frames(frames, config, threads, out_dir, mask_ext, dump_state_every)
    (out_dir / "summary.txt").write_text(format_kv(stats.summary()))
    (out_dir / "timing.txt").write_text(format_kv(stats.timing()))
    return stats


def evaluate(spec: SequenceSpec, config: PipelineConfig, sequence: str = "", category: str = "",
             threads: int = 1, out_dir=None, mask_ext: Optional[str] = None
             ) -> Tuple[MetricsRow, RunStats]:
    """Run the pipeline on a sequence and score it against its ground truth."""
    if spec.gt_dir is None:
        raise MissingGroundTruthError(f"{spec.input_dir}: no groundtruth/ directory")
    gts = gt_paths(spec)
    n_frames = sequence_length(spec)
    if len(gts) != n_frames:
        raise MissingGroundTruthError(
            f"{spec.gt_dir}: {len(gts)} ground-truth frames for {n_frames} input frames")
    if out_dir is not None:
        out_dir = ensure_writable_dir(out_dir)
    conf = Confusion()

    def score(result):
        gt = read_gt(gts[result.index - 1])
        accumulate(conf, result.final, gt, spec.roi_mask, spec.in_window(result.index))

    stats = run_frames(prefetch(load_sequence(spec)), config, threads, out_dir, mask_ext,
                       on_result=score)
    return metrics(conf, sequence, category), stats


def bench(frames: Iterable[np.ndarray], config: PipelineConfig, threads: int = 1) -> RunStats:
    """Time the pipeline alone: frames are pre-decoded, no masks written."""
    frames = list(frames)
    return run_frames(frames, config, threads)
