"""Frame rendering and corpus assembly: per-area categorical/continuous
raster frames, pressure charts with a labeled graticule, frameset manifests
and the shuffled train/validation/test corpus manifest.

Frames are PNG (lossless) at a 10:6 aspect ratio; 24 frames encode the
24 hourly timesteps at 24 fps (1 s), combined wind uses 48 frames (2 s).
"""

from __future__ import annotations

import io
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from .errors import AspectRatioInvalid, DuplicateEntry, TimeAxisInvalid
from .generator import LabeledGrid, make_labeled_grid
from .grid import GridField, SeaArea, mask_sea_area
from .scales import CategoricalScale

BACKGROUND_RGB = (128, 128, 128)   # reserved for NaN / masked-out cells
FPS = 24
DEFAULT_SIZE = (1000, 600)
GRATICULE_STEP_DEG = 5.0
GRATICULE_LINE_PX = 2
GRATICULE_RGB = (30, 30, 30)

SPLIT_NAMES = ("train", "validation", "test")
SPLIT_WEIGHTS = (0.70, 0.15, 0.15)


@dataclass
class FrameSet:
    """Ordered raster frames for one attribute plus playback metadata."""

    attribute: str
    area: str | None
    mode: str                      # categorical | continuous
    fps: int
    duration_s: int
    width: int
    height: int
    frames: list[bytes]            # PNG-encoded, chronological
    palette: list[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.frames) != self.fps * self.duration_s:
            raise TimeAxisInvalid(
                f"{len(self.frames)} frames != fps {self.fps} x {self.duration_s} s")
        if self.width * 6 != self.height * 10:
            raise AspectRatioInvalid(f"{self.width}x{self.height} is not 10:6")

    def save(self, directory: str | Path) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        names = []
        for i, png in enumerate(self.frames):
            name = f"frame_{i:03d}.png"
            (directory / name).write_bytes(png)
            names.append(name)
        manifest = {
            "attribute": self.attribute,
            "area": self.area,
            "mode": self.mode,
            "fps": self.fps,
            "duration_s": self.duration_s,
            "width": self.width,
            "height": self.height,
            "frames": names,
            "palette": self.palette,
        }
        path = directory / "frameset.json"
        path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
        return path


def _check_size(size: tuple[int, int]) -> None:
    w, h = size
    if w * 6 != h * 10:
        raise AspectRatioInvalid(f"{w}x{h} is not a 10:6 aspect ratio")


def _nearest_indices(coords: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Index of the nearest coordinate for each target (both ascending)."""
    idx = np.searchsorted(coords, targets)
    idx = np.clip(idx, 1, coords.size - 1)
    left = coords[idx - 1]
    right = coords[idx]
    return np.where(targets - left <= right - targets, idx - 1, idx)


def _palette_hex(scale: CategoricalScale) -> list[str]:
    return ["#%02x%02x%02x" % b.color for b in scale.bins]


def _pixel_array(fld: GridField, hour: int, scale: CategoricalScale,
                 size: tuple[int, int]) -> np.ndarray:
    """Nearest-cell sample of one hour onto the pixel grid, colored by scale."""
    w, h = size
    # pixel centers; north at the top
    lon_px = fld.lons.min() + (np.arange(w) + 0.5) / w * (fld.lons.max() - fld.lons.min())
    lat_px = fld.lats.max() - (np.arange(h) + 0.5) / h * (fld.lats.max() - fld.lats.min())
    col = _nearest_indices(fld.lons, lon_px)
    row = _nearest_indices(fld.lats, lat_px)
    grid = fld.values[hour][np.ix_(row, col)]

    rgb = np.empty((h, w, 3), dtype=np.uint8)
    rgb[:] = BACKGROUND_RGB
    valid = ~np.isnan(grid)
    if not valid.any():
        return rgb

    vals = grid[valid]
    if scale.rotation_deg:
        vals = (vals + scale.rotation_deg) % 360.0
    lowers = np.array([b.lower for b in scale.bins])
    colors = np.array([b.color for b in scale.bins], dtype=np.float64)
    if scale.mode == "categorical":
        bin_idx = np.clip(np.searchsorted(lowers, vals, side="right") - 1,
                          0, len(scale.bins) - 1)
        rgb[valid] = colors[bin_idx].astype(np.uint8)
    else:
        # graduated ramp anchored at finite bin lower bounds
        stops = np.array([b.lower if math.isfinite(b.lower) else b.upper
                          for b in scale.bins])
        channels = [np.interp(vals, stops, colors[:, c]) for c in range(3)]
        rgb[valid] = np.stack(channels, axis=-1).round().astype(np.uint8)
    return rgb


def _encode_png(rgb: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(rgb, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def rasterize_frame(fld: GridField, hour: int, scale: CategoricalScale,
                    area: SeaArea | None = None,
                    size: tuple[int, int] = DEFAULT_SIZE) -> bytes:
    """Render one hour of a field as a PNG frame.

    Categorical mode paints each cell its bin color; continuous mode
    interpolates the color ramp. NaN and masked-out cells take the reserved
    background color. Output bytes are deterministic for identical inputs.
    """
    _check_size(size)
    if area is not None:
        fld = mask_sea_area(fld, area)
    return _encode_png(_pixel_array(fld, hour, scale, size))


def encode_attribute_video(fld: GridField, scale: CategoricalScale,
                           area: SeaArea | None = None,
                           size: tuple[int, int] = DEFAULT_SIZE) -> FrameSet:
    """24 hourly frames (1 s at 24 fps) for a single attribute."""
    if len(fld.times) != 24:
        raise TimeAxisInvalid(f"expected 24 timesteps, got {len(fld.times)}")
    frames = [rasterize_frame(fld, h, scale, area=area, size=size)
              for h in range(24)]
    return FrameSet(attribute=fld.variable, area=area.name if area else None,
                    mode=scale.mode, fps=FPS, duration_s=1,
                    width=size[0], height=size[1], frames=frames,
                    palette=_palette_hex(scale))


def encode_wind_video(direction: GridField, speed: GridField,
                      direction_scale: CategoricalScale,
                      speed_scale: CategoricalScale,
                      area: SeaArea | None = None,
                      size: tuple[int, int] = DEFAULT_SIZE) -> FrameSet:
    """Combined wind video: 24 direction frames then 24 speed frames (2 s)."""
    for fld in (direction, speed):
        if len(fld.times) != 24:
            raise TimeAxisInvalid(f"expected 24 timesteps, got {len(fld.times)}")
    frames = [rasterize_frame(direction, h, direction_scale, area=area, size=size)
              for h in range(24)]
    frames += [rasterize_frame(speed, h, speed_scale, area=area, size=size)
               for h in range(24)]
    return FrameSet(attribute="wind_combined",
                    area=area.name if area else None,
                    mode=speed_scale.mode, fps=FPS, duration_s=2,
                    width=size[0], height=size[1], frames=frames,
                    palette=_palette_hex(direction_scale) + _palette_hex(speed_scale))


def _graticule_overlay(fld: GridField, size: tuple[int, int],
                       grid: LabeledGrid) -> Image.Image:
    """Transparent layer with 5-degree lines and cell labels; drawn once so
    the overlay is byte-identical across frames."""
    w, h = size
    layer = Image.new("RGBA", (w, h), (0, 0, 0, 0))
    draw = ImageDraw.Draw(layer)
    lat_min, lat_max = fld.lats.min(), fld.lats.max()
    lon_min, lon_max = fld.lons.min(), fld.lons.max()

    def x_of(lon):
        return (lon - lon_min) / (lon_max - lon_min) * (w - 1)

    def y_of(lat):
        return (lat_max - lat) / (lat_max - lat_min) * (h - 1)

    lon = math.ceil(lon_min / GRATICULE_STEP_DEG) * GRATICULE_STEP_DEG
    while lon <= lon_max:
        x = round(x_of(lon))
        draw.rectangle([x, 0, x + GRATICULE_LINE_PX - 1, h - 1],
                       fill=GRATICULE_RGB + (255,))
        lon += GRATICULE_STEP_DEG
    lat = math.ceil(lat_min / GRATICULE_STEP_DEG) * GRATICULE_STEP_DEG
    while lat <= lat_max:
        y = round(y_of(lat))
        draw.rectangle([0, y, w - 1, y + GRATICULE_LINE_PX - 1],
                       fill=GRATICULE_RGB + (255,))
        lat += GRATICULE_STEP_DEG

    for i in range(grid.lat_edges.size - 1):
        for j in range(grid.lon_edges.size - 1):
            clat = (grid.lat_edges[i] + grid.lat_edges[i + 1]) / 2
            clon = (grid.lon_edges[j] + grid.lon_edges[j + 1]) / 2
            if lat_min <= clat <= lat_max and lon_min <= clon <= lon_max:
                draw.text((x_of(clon), y_of(clat)), f"{chr(ord('A') + i)}{j + 1}",
                          fill=GRATICULE_RGB + (255,), anchor="mm")
    return layer


def render_pressure_frames(fld: GridField, scale: CategoricalScale,
                           labeled_grid: LabeledGrid | None = None,
                           size: tuple[int, int] = DEFAULT_SIZE) -> FrameSet:
    """Full-domain pressure frames with the labeled graticule burned in."""
    _check_size(size)
    if len(fld.times) != 24:
        raise TimeAxisInvalid(f"expected 24 timesteps, got {len(fld.times)}")
    grid = labeled_grid or make_labeled_grid(
        (fld.lats.min(), fld.lats.max(), fld.lons.min(), fld.lons.max()))
    overlay = _graticule_overlay(fld, size, grid)
    frames = []
    for hour in range(24):
        base = Image.fromarray(_pixel_array(fld, hour, scale, size), mode="RGB")
        base.paste(overlay, (0, 0), overlay)
        buf = io.BytesIO()
        base.save(buf, format="PNG")
        frames.append(buf.getvalue())
    return FrameSet(attribute="pressure", area=None, mode=scale.mode,
                    fps=FPS, duration_s=1, width=size[0], height=size[1],
                    frames=frames, palette=_palette_hex(scale))


# --- corpus manifest ------------------------------------------------------------

def split_sizes(n: int) -> tuple[int, int, int]:
    """Largest-remainder apportionment of n entries into 70/15/15 splits;
    remainder ties go to the earlier split."""
    quotas = [n * w for w in SPLIT_WEIGHTS]
    sizes = [int(q) for q in quotas]
    remainders = [q - s for q, s in zip(quotas, sizes)]
    for _ in range(n - sum(sizes)):
        i = max(range(3), key=lambda i: (remainders[i], -i))
        sizes[i] += 1
        remainders[i] = -1.0
    return tuple(sizes)


def build_corpus(entries: list[dict], seed: int) -> dict:
    """Assign every entry to exactly one split under a seeded shuffle.

    Each entry dict must carry a unique "id"; frame_set/bulletin references
    pass through untouched. Returns the corpus manifest.
    """
    if not entries:
        raise ValueError("no entries to build a corpus from")
    ids = [e["id"] for e in entries]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise DuplicateEntry(f"duplicate entry ids: {dup}")
    shuffled = list(entries)
    random.Random(seed).shuffle(shuffled)
    n_train, n_val, n_test = split_sizes(len(shuffled))
    out_entries = []
    for i, entry in enumerate(shuffled):
        if i < n_train:
            split = "train"
        elif i < n_train + n_val:
            split = "validation"
        else:
            split = "test"
        out_entries.append({**entry, "split": split})
    return {
        "seed": seed,
        "counts": {"train": n_train, "validation": n_val, "test": n_test},
        "entries": out_entries,
    }
