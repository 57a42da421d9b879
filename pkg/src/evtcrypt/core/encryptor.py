# pyre-strict
"""Event encryption by spatiotemporally correlated noise synthesis.

Pipeline: build the noise mask, flood it breadth-first from the true-event pixels
while copying each parent's timestamps with a distance dependent stretch, then
flip polarities by the parity of each pixel's Szudzik code.
"""

import logging
from collections import deque
from collections.abc import Sequence
from functools import lru_cache
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
import numpy.typing as npt
import polars as pl
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from evtcrypt.core.config import EncryptConfig
from evtcrypt.core.errors import AuditError, DataError, EmptyStreamError, PlaneMismatchError
from evtcrypt.core.events import (
    Event,
    EventStream,
    Pixel,
    Resolution,
    SpatialPlane,
    canonical_sort,
    l1_space,
    project_plane,
    sort_frame,
    szudzik_pair_array,
    szudzik_pair_expr,
)
from evtcrypt.core.prng import SplitMix64, sign_block

if TYPE_CHECKING:
    from evtcrypt.formats.keyfile import KeyFile

logger = logging.getLogger(__name__)


class NoiseMask(BaseModel):
    """Pixels M eligible for synthetic noise, as a (height, width) boolean grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    resolution: Resolution
    grid: np.ndarray  # type: ignore[type-arg]

    @field_validator("grid", mode="before")  # pyre-fixme[56]
    @classmethod
    def as_bool_grid(cls, v: Any) -> npt.NDArray[np.bool_]:
        grid = np.array(v, dtype=bool)
        grid.flags.writeable = False
        return grid

    @model_validator(mode="after")  # pyre-fixme[56]
    def validate_shape(self) -> "NoiseMask":
        expected = (self.resolution.height, self.resolution.width)
        if self.grid.shape != expected:
            raise ValueError(f"Mask grid shape {self.grid.shape} does not match {expected}")
        return self

    @classmethod
    def from_pixels(
        cls, resolution: Resolution, pixels: Sequence[Pixel | tuple[int, int]]
    ) -> "NoiseMask":
        grid = np.zeros((resolution.height, resolution.width), dtype=bool)
        for p in pixels:
            x, y = p.as_tuple() if isinstance(p, Pixel) else p
            grid[y, x] = True
        return cls(resolution=resolution, grid=grid)

    def __len__(self) -> int:
        return int(self.grid.sum())

    def __contains__(self, item: object) -> bool:
        if isinstance(item, Pixel):
            item = item.as_tuple()
        if not isinstance(item, tuple):
            return False
        x, y = item
        return self.resolution.contains(x, y) and bool(self.grid[y, x])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NoiseMask):
            return NotImplemented
        return self.resolution == other.resolution and np.array_equal(self.grid, other.grid)

    def pixels(self) -> set[Pixel]:
        ys, xs = np.nonzero(self.grid)
        return {Pixel(x=int(x), y=int(y)) for x, y in zip(xs, ys, strict=True)}


class EncryptStats(BaseModel):
    """Counters collected while encrypting one stream."""

    input_events: int = 0
    output_events: int = 0
    noise_events: int = 0
    mask_pixels: int = 0
    filled_pixels: int = 0
    unreached_pixels: int = 0
    max_depth: int = 0
    saturated_pixels: int = 0


class EncryptedBundle(BaseModel):
    """Encrypted stream Ẽ together with the key material E_x."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    stream: EventStream
    plane: SpatialPlane
    lineage: dict[tuple[int, int], tuple[int, int]] = Field(default_factory=dict)
    stats: EncryptStats = Field(default_factory=EncryptStats)
    config: EncryptConfig = Field(default_factory=EncryptConfig)

    def write_key(self, path: str | Path, secret: int, nonce: int | None = None) -> "KeyFile":
        """Persist the key plane, encrypted with ``secret``."""
        # Import here to avoid circular imports
        from evtcrypt.formats.keyfile import write_key

        return write_key(self.plane, secret, path, nonce=nonce)


def build_mask(stream: EventStream, cfg: EncryptConfig) -> NoiseMask:
    """Compute the noise mask M for a stream.

    Args:
        stream: Events to encrypt
        cfg: Encryption settings; ``mask_mode`` selects the rule

    Returns:
        Mask disjoint from the stream's pixel plane

    Raises:
        EmptyStreamError: If the stream has no events
    """
    if len(stream) == 0:
        raise EmptyStreamError("Cannot encrypt an empty event stream")
    res = stream.resolution
    occupied = np.zeros((res.height, res.width), dtype=bool)
    occupied[stream.data["y"].to_numpy(), stream.data["x"].to_numpy()] = True

    if cfg.mask_mode == "full":
        grid = np.ones_like(occupied)
    elif cfg.mask_mode == "band":
        grid = _dilate_l1(occupied, cfg.band_radius)
    else:
        x0, y0, x1, y1 = cfg.region  # type: ignore[misc]
        grid = np.zeros_like(occupied)
        grid[y0 : min(y1, res.height), x0 : min(x1, res.width)] = True

    grid &= ~occupied
    mask = NoiseMask(resolution=res, grid=grid)
    logger.info("Built %s mask with %d pixels", cfg.mask_mode, len(mask))
    return mask


def _dilate_l1(grid: npt.NDArray[np.bool_], radius: int) -> npt.NDArray[np.bool_]:
    """Grow a boolean grid to every pixel within L1 distance ``radius``."""
    out = grid.copy()
    for _ in range(radius):
        step = out.copy()
        step[1:, :] |= out[:-1, :]
        step[:-1, :] |= out[1:, :]
        step[:, 1:] |= out[:, :-1]
        step[:, :-1] |= out[:, 1:]
        out = step
    return out


@lru_cache(maxsize=16)
def neighbor_offsets(spatial_threshold: int) -> tuple[tuple[int, int], ...]:
    """Offsets with 1 <= L1 <= T_x in synthesis order.

    For T_x = 1 this is (+1, 0), (-1, 0), (0, +1), (0, -1).
    """
    r = spatial_threshold
    offsets = [
        (dx, dy)
        for dx in range(-r, r + 1)
        for dy in range(-r, r + 1)
        if 0 < abs(dx) + abs(dy) <= r
    ]
    offsets.sort(key=lambda o: (abs(o[0]) + abs(o[1]), abs(o[1]), -o[0], -o[1]))
    return tuple(offsets)


def spatial_neighbors(center: Pixel, mask: NoiseMask, cfg: EncryptConfig) -> set[Pixel]:
    """Mask pixels within L1 distance T_x of ``center`` (the neighbor query θ)."""
    result = set()
    for dx, dy in neighbor_offsets(cfg.spatial_threshold):
        x, y = center.x + dx, center.y + dy
        if (x, y) in mask:
            result.add(Pixel(x=x, y=y))
    return result


TIMESTAMP_MAX = int(np.iinfo(np.int64).max)
_FLOAT_EXACT = 2**53


def _stretch(parent_ts: npt.NDArray[np.int64], distance: int, cfg: EncryptConfig) -> npt.NDArray[np.int64]:
    """Noise timestamps t_i * (1 + sigma * d), rounded half up, clamped by an absolute T_t.

    Offsets are computed in float64 while t_i and t_i * sigma * d stay below 2**53 and
    exactly from the integer ratio of sigma beyond that. Results saturate at
    ``TIMESTAMP_MAX``.
    """
    if len(parent_ts) == 0:
        return parent_ts.copy()
    scale = cfg.sigma * distance
    t_max = int(parent_ts.max())
    if t_max < _FLOAT_EXACT and t_max * scale < _FLOAT_EXACT:
        offset = np.floor(parent_ts.astype(np.float64) * scale + 0.5).astype(np.int64)
    else:
        num, den = cfg.sigma.as_integer_ratio()
        num *= distance
        offset = np.array(
            [min((2 * t * num + den) // (2 * den), TIMESTAMP_MAX) for t in parent_ts.tolist()],
            dtype=np.int64,
        )
    if cfg.t_threshold is not None:
        offset = np.minimum(offset, cfg.t_threshold - 1)
    return parent_ts + np.minimum(offset, TIMESTAMP_MAX - parent_ts)


def synthesize_at(
    target: Pixel,
    parent_events: Sequence[Event],
    parent_pixel: Pixel,
    cfg: EncryptConfig,
    rng: SplitMix64,
) -> list[Event]:
    """Synthesize one noise event at ``target`` per parent event (the function φ).

    Args:
        target: Pixel receiving the noise
        parent_events: Events of the parent pixel, in order
        parent_pixel: Pixel the parent events sit on
        cfg: Encryption settings
        rng: Polarity source; one draw per parent event

    Returns:
        Noise events at ``target``, aligned with ``parent_events``
    """
    if target == parent_pixel:
        raise DataError(f"Noise target {target.as_tuple()} equals its parent pixel")
    if not parent_events:
        raise EmptyStreamError("Noise synthesis needs at least one parent event")
    distance = l1_space(target, parent_pixel)
    parent_ts = np.array([e.timestamp for e in parent_events], dtype=np.int64)
    new_ts = _stretch(parent_ts, distance, cfg)
    if cfg.audit:
        _audit_batch(parent_ts, new_ts, distance, cfg)
    return [
        Event(pixel=target, polarity=rng.next_sign(), timestamp=int(t)) for t in new_ts
    ]


def _audit_batch(
    parent_ts: npt.NDArray[np.int64],
    new_ts: npt.NDArray[np.int64],
    distance: int,
    cfg: EncryptConfig,
) -> None:
    if distance < 1 or distance > cfg.spatial_threshold:
        raise AuditError(f"Noise placed at distance {distance}, T_x is {cfg.spatial_threshold}")
    if len(new_ts) != len(parent_ts):
        raise AuditError(f"Noise count {len(new_ts)} differs from parent count {len(parent_ts)}")
    gaps = np.abs(new_ts - parent_ts)
    if cfg.t_threshold is not None and len(gaps) and int(gaps.max()) >= cfg.t_threshold:
        raise AuditError(f"Noise drifted {int(gaps.max())} µs from its parent, T_t is {cfg.t_threshold}")


class _FloodResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    noise: pl.DataFrame
    lineage: dict[tuple[int, int], tuple[int, int]]
    filled_pixels: int
    unreached_pixels: int
    max_depth: int
    saturated_pixels: int


def _flood(stream: EventStream, mask: NoiseMask, cfg: EncryptConfig) -> _FloodResult:
    """Breadth-first noise propagation over the mask."""
    width, height = stream.resolution.width, stream.resolution.height
    ts = stream.data["t"].to_numpy().astype(np.int64)
    xs = stream.data["x"].to_numpy().astype(np.int64)
    ys = stream.data["y"].to_numpy().astype(np.int64)
    flat = ys * width + xs

    order = np.lexsort((ts, flat))
    flat_sorted, ts_sorted = flat[order], ts[order]
    seeds, starts = np.unique(flat_sorted, return_index=True)
    ends = np.append(starts[1:], len(flat_sorted))
    times: dict[int, npt.NDArray[np.int64]] = {
        int(f): ts_sorted[s:e] for f, s, e in zip(seeds, starts, ends, strict=True)
    }
    seed_codes = szudzik_pair_array(seeds % width, seeds // width)
    queue = deque(int(f) for f in seeds[np.argsort(seed_codes, kind="stable")])
    true_pixels = set(times)

    remaining = bytearray(mask.grid.ravel().astype(np.uint8).tobytes())
    depth: dict[int, int] = dict.fromkeys(true_pixels, 0)
    offsets = [(dx, dy, abs(dx) + abs(dy)) for dx, dy in neighbor_offsets(cfg.spatial_threshold)]
    filled: list[int] = []
    saturated = 0
    saturated_depth = 0
    chunks: list[npt.NDArray[np.int64]] = []
    parents: list[int] = []

    while queue:
        cur = queue.popleft()
        cx, cy = cur % width, cur // width
        cur_ts = times[cur]
        for dx, dy, distance in offsets:
            nx, ny = cx + dx, cy + dy
            if nx < 0 or ny < 0 or nx >= width or ny >= height:
                continue
            nf = ny * width + nx
            if not remaining[nf]:
                continue
            remaining[nf] = 0
            new_ts = _stretch(cur_ts, distance, cfg)
            if cfg.audit:
                if nf in true_pixels:
                    raise AuditError(f"Noise landed on true-event pixel ({nx}, {ny})")
                _audit_batch(cur_ts, new_ts, distance, cfg)
            times[nf] = new_ts
            depth[nf] = depth[cur] + 1
            if int(new_ts[-1]) == TIMESTAMP_MAX:
                saturated += 1
                saturated_depth = saturated_depth or depth[nf]
            filled.append(nf)
            parents.append(cur)
            chunks.append(new_ts)
            queue.append(nf)

    counts = np.array([len(c) for c in chunks], dtype=np.int64)
    filled_arr = np.array(filled, dtype=np.int64)
    noise_flat = np.repeat(filled_arr, counts)
    noise_t = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)
    noise = pl.DataFrame(
        {
            "t": noise_t,
            "x": (noise_flat % width).astype(np.int32),
            "y": (noise_flat // width).astype(np.int32),
            "p": sign_block(cfg.seed, 0, len(noise_t)),
        }
    )
    lineage = {
        (f % width, f // width): (p % width, p // width)
        for f, p in zip(filled, parents, strict=True)
    }
    unreached = remaining.count(1)
    if unreached:
        logger.warning("%d mask pixels are not connected to any event pixel and stay empty", unreached)
    if saturated:
        logger.warning(
            "Noise timestamps on %d pixels saturated at %d from BFS depth %d; "
            "set an absolute T_t (--tt) to bound the stretch",
            saturated,
            TIMESTAMP_MAX,
            saturated_depth,
        )
    return _FloodResult(
        noise=noise,
        lineage=lineage,
        filled_pixels=len(filled),
        unreached_pixels=unreached,
        max_depth=max(depth.values(), default=0),
        saturated_pixels=saturated,
    )


def fill_noise(stream: EventStream, mask: NoiseMask, cfg: EncryptConfig) -> EventStream:
    """Flood the mask with correlated noise.

    Args:
        stream: True events
        mask: Pixels to fill, disjoint from the stream's plane
        cfg: Encryption settings

    Returns:
        True events plus all synthesized noise, canonically sorted

    Raises:
        EmptyStreamError: If the stream has no events
    """
    return _fill(stream, mask, cfg)[0]


def _fill(
    stream: EventStream, mask: NoiseMask, cfg: EncryptConfig
) -> tuple[EventStream, _FloodResult]:
    if len(stream) == 0:
        raise EmptyStreamError("Cannot encrypt an empty event stream")
    if mask.resolution != stream.resolution:
        raise DataError("Noise mask and stream have different resolutions")
    if mask.grid[stream.data["y"].to_numpy(), stream.data["x"].to_numpy()].any():
        raise DataError("Noise mask overlaps true-event pixels")
    result = _flood(stream, mask, cfg)
    combined = pl.concat([stream.data, result.noise])
    logger.info(
        "Filled %d pixels with %d noise events (max depth %d)",
        result.filled_pixels,
        result.noise.height,
        result.max_depth,
    )
    return stream.with_data(sort_frame(combined)), result


def polarity_map(stream: EventStream) -> EventStream:
    """Flip polarity on pixels with an odd Szudzik code (the involution λ)."""
    flipped = stream.data.with_columns(
        pl.when(szudzik_pair_expr() % 2 == 1)
        .then(-pl.col("p"))
        .otherwise(pl.col("p"))
        .cast(pl.Int8)
        .alias("p")
    )
    return stream.with_data(flipped)


def encrypt(stream: EventStream, cfg: EncryptConfig | None = None) -> EncryptedBundle:
    """Encrypt a stream: mask, noise flood, polarity disruption.

    Args:
        stream: Non-empty event stream
        cfg: Encryption settings, defaults to ``EncryptConfig()``

    Returns:
        Bundle with the encrypted stream and the key plane

    Raises:
        EmptyStreamError: If the stream has no events
    """
    cfg = cfg or EncryptConfig()
    source = canonical_sort(stream)
    mask = build_mask(source, cfg)
    filled, result = _fill(source, mask, cfg)
    encrypted = canonical_sort(polarity_map(filled))
    stats = EncryptStats(
        input_events=len(source),
        output_events=len(encrypted),
        noise_events=result.noise.height,
        mask_pixels=len(mask),
        filled_pixels=result.filled_pixels,
        unreached_pixels=result.unreached_pixels,
        max_depth=result.max_depth,
        saturated_pixels=result.saturated_pixels,
    )
    return EncryptedBundle(
        stream=encrypted,
        plane=project_plane(source),
        lineage=result.lineage,
        stats=stats,
        config=cfg,
    )


def decrypt(stream: EventStream, plane: SpatialPlane) -> EventStream:
    """Recover the true events of an encrypted stream.

    Args:
        stream: Encrypted stream
        plane: True-event pixels decoded from the key

    Returns:
        Events on ``plane`` with their original polarity, canonically sorted

    Raises:
        PlaneMismatchError: If the plane holds pixels outside the stream's resolution
    """
    if not plane.fits(stream.resolution):
        raise PlaneMismatchError(
            f"Key plane has pixels outside resolution "
            f"{stream.resolution.width}x{stream.resolution.height}"
        )
    codes = pl.Series("codes", plane.codes, dtype=pl.Int64)
    kept = stream.data.filter(szudzik_pair_expr().is_in(codes))
    return canonical_sort(polarity_map(stream.with_data(kept)))

