"""Frame-by-frame motion detection pipeline.

Per frame: LBSP -> sample-consensus classification -> blink/temporal
state -> dynamic-background re-check -> feedback controllers ->
false-positive collection -> background model update -> post-processing.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from .background_model import BackgroundModel, init_model, maybe_update
from .classifier import classify_with_distance
from .config import PipelineConfig
from .dynamic_recheck import (
    BlinkState,
    DynamicBgModel,
    TemporalState,
    collect_fp,
    fp_collect_predicate,
    recheck,
    update_blink,
    update_temporal,
)
from .feedback import FeedbackState, update_dmin, update_r, update_t, update_v, weight
from .frame_io import write_image
from .lbsp import as_frame, compute_lbsp
from .postprocess import postprocess
from .rng import CounterRng


class PipelineStateError(RuntimeError):
    pass


class GeometryChangeError(ValueError):
    pass


@dataclass
class FrameResult:
    index: int
    raw: np.ndarray
    rechecked: np.ndarray
    final: np.ndarray
    elapsed_ms: float


# map name -> (display range, filename)
STATE_MAPS = {
    "r": ((1.0, 10.0), "r_1-10"),
    "t_rate": ((2.0, 256.0), "t_2-256"),
    "v": ((0.0, 10.0), "v_0-10"),
    "d_min": ((0.0, 1.0), "dmin_0-1"),
    "s_feed": ((0.0, 1.0), "sfeed_0-1"),
    "br": ((0.0, 1.0), "br_0-1"),
    "dr": ((0.0, 1.0), "dr_0-1"),
}


def normalize_map(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    scaled = (np.clip(values, lo, hi) - lo) / (hi - lo)
    return np.rint(scaled * 255.0).astype(np.uint8)


class Pipeline:
    def __init__(self, config: Optional[PipelineConfig] = None, threads: int = 1,
                 check_invariants: bool = False):
        self.config = config or PipelineConfig()
        self.threads = max(1, int(threads))
        self.check_invariants = check_invariants
        self.rng = CounterRng(self.config.seed)
        self.index = 0
        self.model: Optional[BackgroundModel] = None
        self.dyn: Optional[DynamicBgModel] = None
        self.feedback: Optional[FeedbackState] = None
        self.blink: Optional[BlinkState] = None
        self.temporal: Optional[TemporalState] = None
        self._prev: Dict[str, np.ndarray] = {}

    def _initialize(self, frame: np.ndarray, lbsp: np.ndarray) -> None:
        cfg = self.config
        h, w, _ = frame.shape
        self.model = init_model(frame, lbsp, self.rng, cfg.n_samples)
        self.dyn = DynamicBgModel.create(frame.shape, cfg.m_dyn_samples, cfg.dyn_color_threshold)
        self.feedback = FeedbackState.create(
            (h, w),
            alpha_short=cfg.alpha_short, alpha_long=cfg.alpha_long,
            v_decr=cfg.v_decr, v_floor=cfg.v_floor, d_eps=cfg.d_eps,
            t_min=cfg.t_min, t_max=cfg.t_max,
        )
        self.blink = BlinkState.create((h, w), cfg.blink_threshold, cfg.warmup_frames)
        self.temporal = TemporalState.create((h, w), cfg.alpha_short, cfg.dist_gate, cfg.feed_gate,
                                             cfg.dist_gate_above)

    def process_frame(self, frame) -> FrameResult:
        start = time.perf_counter()
        cfg = self.config
        frame = as_frame(frame)
        if self.model is not None and frame.shape != self.model.shape:
            raise GeometryChangeError(
                f"frame {self.index + 1} has shape {frame.shape}, expected {self.model.shape}")
        self.index += 1
        t = self.index
        lbsp = compute_lbsp(frame, cfg.lbsp_params(), self.threads)

        if t == 1:
            self._initialize(frame, lbsp)
            raw = np.zeros(frame.shape[:2], dtype=np.uint8)
            rechecked = raw.copy()
        else:
            prev = self._prev
            fb = self.feedback
            raw, d = classify_with_distance(
                frame, lbsp, self.model, fb.r, cfg.threshold_params(), self.threads)
            update_blink(self.blink, raw, prev["raw"], t)
            update_temporal(self.temporal, frame, prev["frame"], lbsp, prev["lbsp"],
                            prev["rechecked"], self.threads)
            if cfg.recheck_enabled:
                rechecked = recheck(raw, self.blink, self.dyn, frame, self.threads)
            else:
                rechecked = raw.copy()

            update_dmin(fb, d)
            w = weight(self.blink.dr, self.temporal.dist_last, self.temporal.s_feed,
                       cfg.dist_gate, cfg.feed_gate, cfg.dist_gate_above)
            update_v(fb, rechecked != prev["rechecked"], w)
            update_r(fb)
            update_t(fb, rechecked == 255)
            if self.check_invariants:
                fb.check_invariants()

            predicate = fp_collect_predicate(raw, prev["raw"], self.temporal)
            collect_fp(self.dyn, frame, predicate, self.rng, t)
            maybe_update(self.model, frame, lbsp, rechecked, fb.t_rate, self.rng, t,
                         cfg.neighbor_diffusion)

        final = postprocess(rechecked, cfg.post_params())
        self._prev = {"frame": frame, "lbsp": lbsp, "raw": raw, "rechecked": rechecked}
        elapsed = (time.perf_counter() - start) * 1000.0
        return FrameResult(t, raw, rechecked, final, elapsed)

    def state_maps(self) -> Dict[str, np.ndarray]:
        if self.index == 0:
            raise PipelineStateError("no frame processed yet; state is undefined")
        fb = self.feedback
        return {
            "r": fb.r,
            "t_rate": fb.t_rate,
            "v": fb.v,
            "d_min": fb.d_min,
            "s_feed": self.temporal.s_feed,
            "br": self.blink.br,
            "dr": self.blink.dr.astype(np.float64),
        }

    def dump_state(self, out_dir, ext: str = ".pgm") -> Dict[str, Path]:
        """Write each controller map as a normalized grayscale image.

        The display range is encoded in the filename, e.g. t_2-256.pgm.
        """
        maps = self.state_maps()
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = {}
        for name, values in maps.items():
            (lo, hi), stem = STATE_MAPS[name]
            path = out_dir / f"{stem}{ext}"
            write_image(normalize_map(values, lo, hi), path)
            written[name] = path
        return written
