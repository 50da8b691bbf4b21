"""Per-pixel numba kernels.

Each kernel processes rows [y0, y1) so callers can split a frame into
bands and run them on a thread pool (kernels release the GIL).
"""

import numpy as np
from numba import njit

from .rng import (INIT_OFFSET, NEIGHBOR_DIR, NEIGHBOR_GATE, NEIGHBOR_SLOT, SELF_GATE,
                  SELF_SLOT, draw_below, stream_key)

# (dx, dy) for bit p = 0..15
LBSP_OFFSETS = np.array(
    [(-2, -2), (0, -2), (2, -2), (-1, -1), (0, -1), (1, -1), (-2, 0), (-1, 0),
     (1, 0), (2, 0), (-1, 1), (0, 1), (1, 1), (-2, 2), (0, 2), (2, 2)],
    dtype=np.int64,
)

POPCOUNT16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.uint8)

_B1 = np.uint64(1)
_B2 = np.uint64(2)
_B4 = np.uint64(4)
_B56 = np.uint64(56)
_M55 = np.uint64(0x5555555555555555)
_M33 = np.uint64(0x3333333333333333)
_M0F = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def popcount64(v):
    v = v - ((v >> _B1) & _M55)
    v = (v & _M33) + ((v >> _B2) & _M33)
    v = (v + (v >> _B4)) & _M0F
    return np.int64((v * _H01) >> _B56)


@njit(cache=True, nogil=True)
def lbsp_rows(pad, thr_lut, offsets, out, y0, y1):
    """LBSP codes for rows [y0, y1).

    pad is the frame channel-planar (C, H+4, W+4) with 2 px of edge
    replication. thr_lut[v] = floor(t_r * v): for integer differences
    |d| <= t_r * v is the same test as |d| <= floor(t_r * v).
    """
    nc, _, wp = pad.shape
    w = wp - 4
    row = np.empty(w, np.uint16)
    thr = np.empty(w, np.int16)
    ctr = np.empty(w, np.int16)
    for c in range(nc):
        for y in range(y0, y1):
            for x in range(w):
                v = pad[c, y + 2, x + 2]
                ctr[x] = v
                thr[x] = thr_lut[v]
                row[x] = 0
            for p in range(16):
                yy = y + 2 + offsets[p, 1]
                dx = 2 + offsets[p, 0]
                bit = np.uint16(1 << p)
                for x in range(w):
                    d = np.int16(pad[c, yy, x + dx]) - ctr[x]
                    if d < 0:
                        d = -d
                    row[x] |= bit * np.uint16(d <= thr[x])
            for x in range(w):
                out[y, x, c] = row[x]


@njit(cache=True, nogil=True)
def classify_rows(img, packed, s_colors, s_packed, r_map, r0_color, r0_lbsp,
                  min_matches, out_mask, out_dmin, y0, y1):
    """Sample-consensus test plus the min normalized sample distance.

    Samples are stored channel-planar per pixel, (H, W, C, N), so the
    per-sample loops are branch-free and vectorize. LBSP codes arrive
    packed, one uint64 per pixel/sample, so the summed hamming distance is
    one popcount. Strict real thresholds become inclusive integer ones
    (l1 < t  <=>  l1 <= ceil(t) - 1). The minimum is tracked as the
    integer 16*L1 + 255*hamming, i.e. the normalized distance times
    2*255*16*C.
    """
    h, w, nc = img.shape
    n_samples = s_colors.shape[3]
    scale = 2.0 * 255.0 * 16.0 * nc
    worst = 2 * 255 * 16 * nc
    l1 = np.empty(n_samples, np.int32)
    for y in range(y0, y1):
        for x in range(w):
            r = r_map[y, x]
            color_thr = np.int32(np.ceil(nc * r0_color * r)) - 1
            lbsp_thr = np.int64(np.ceil(nc * (2.0 ** r + r0_lbsp))) - 1
            v = np.int32(img[y, x, 0])
            for n in range(n_samples):
                l1[n] = abs(v - np.int32(s_colors[y, x, 0, n]))
            for c in range(1, nc):
                v = np.int32(img[y, x, c])
                for n in range(n_samples):
                    l1[n] += abs(v - np.int32(s_colors[y, x, c, n]))
            code = packed[y, x]
            matches = 0
            best = worst
            for n in range(n_samples):
                ham = popcount64(code ^ s_packed[y, x, n])
                best = min(best, 16 * l1[n] + 255 * ham)
                matches += (l1[n] <= color_thr) & (ham <= lbsp_thr)
            out_mask[y, x] = 255 if matches < min_matches else 0
            out_dmin[y, x] = best / scale


@njit(cache=True, nogil=True)
def interframe_rows(img, prev, packed, prev_packed, out, y0, y1):
    """Normalized colour + LBSP change between consecutive frames."""
    h, w, nc = img.shape
    scale = 2.0 * 255.0 * 16.0 * nc
    for y in range(y0, y1):
        for x in range(w):
            l1 = 0
            for c in range(nc):
                l1 += abs(np.int32(img[y, x, c]) - np.int32(prev[y, x, c]))
            ham = popcount64(packed[y, x] ^ prev_packed[y, x])
            out[y, x] = (16 * l1 + 255 * ham) / scale


@njit(cache=True, nogil=True)
def dyn_min_l1_rows(img, d_colors, written, candidates, out, y0, y1):
    """Min L1 colour distance to the written dynamic slots of candidate pixels."""
    h, w, nc = img.shape
    m = d_colors.shape[2]
    for y in range(y0, y1):
        for x in range(w):
            if not candidates[y, x]:
                continue
            best = -1
            for k in range(m):
                if not written[y, x, k]:
                    continue
                l1 = 0
                for c in range(nc):
                    l1 += abs(np.int64(img[y, x, c]) - np.int64(d_colors[y, x, k, c]))
                if best < 0 or l1 < best:
                    best = l1
            out[y, x] = best


@njit(cache=True, nogil=True)
def init_samples(seed, img, packed, s_colors, s_packed):
    """Sample n of pixel p copies a 3x3 neighbour picked by counter p*N + n."""
    h, w, nc = img.shape
    n_samples = s_colors.shape[3]
    key = stream_key(seed, np.uint64(0), INIT_OFFSET)
    for y in range(h):
        for x in range(w):
            base = (y * w + x) * n_samples
            for n in range(n_samples):
                k = draw_below(key, base + n, 9)
                yy = min(max(y + k // 3 - 1, 0), h - 1)
                xx = min(max(x + k % 3 - 1, 0), w - 1)
                for c in range(nc):
                    s_colors[y, x, c, n] = img[yy, xx, c]
                s_packed[y, x, n] = packed[yy, xx]


@njit(cache=True, nogil=True)
def update_model(seed, frame_index, img, packed, mask, period, s_colors, s_packed,
                 neighbors, diffusion):
    """Self-update then neighbour diffusion, both in ascending pixel order.

    Sequential on purpose: later writes to the same slot win, which fixes
    the collision rule independently of any parallel split.
    """
    h, w, nc = img.shape
    n_samples = s_colors.shape[3]
    k_gate = stream_key(seed, frame_index, SELF_GATE)
    k_slot = stream_key(seed, frame_index, SELF_SLOT)
    for y in range(h):
        for x in range(w):
            if mask[y, x] != 0:
                continue
            p = y * w + x
            if draw_below(k_gate, p, period[y, x]) != 0:
                continue
            n = draw_below(k_slot, p, n_samples)
            for c in range(nc):
                s_colors[y, x, c, n] = img[y, x, c]
            s_packed[y, x, n] = packed[y, x]
    if not diffusion:
        return
    k_gate = stream_key(seed, frame_index, NEIGHBOR_GATE)
    k_dir = stream_key(seed, frame_index, NEIGHBOR_DIR)
    k_slot = stream_key(seed, frame_index, NEIGHBOR_SLOT)
    for y in range(h):
        for x in range(w):
            if mask[y, x] != 0:
                continue
            p = y * w + x
            if draw_below(k_gate, p, period[y, x]) != 0:
                continue
            d = draw_below(k_dir, p, 8)
            ty = y + neighbors[d, 0]
            tx = x + neighbors[d, 1]
            if ty < 0 or ty >= h or tx < 0 or tx >= w:
                continue
            n = draw_below(k_slot, p, n_samples)
            for c in range(nc):
                s_colors[ty, tx, c, n] = img[y, x, c]
            s_packed[ty, tx, n] = packed[y, x]
