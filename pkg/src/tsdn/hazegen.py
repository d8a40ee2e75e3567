"""Atmospheric-scattering haze model and procedural scene generation.

The haze formation model is ``I(x) = J(x) * t(x) + A * (1 - t(x))`` with
transmission ``t(x) = exp(-beta * d(x))`` under homogeneous scattering:
``J`` is the clear scene, ``d`` the scene depth, ``A`` the global
atmospheric light and ``beta`` the scattering coefficient.  Every hazy
pixel is therefore a convex combination of the clear pixel and ``A``.

Scene groups pair one clear image and one depth map with ``n`` hazy
variants drawn from distinct ``(A, beta)`` parameters, which is the
multi-to-one training unit used downstream.  All generation is a pure
function of ``(spec.seed, scene_id)`` so scenes can be produced in any
order, or in parallel, with identical results.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, ShapeError
from .imgio import save_pfm, save_png

MANIFEST_VERSION = 1
MANIFEST_NAME = "manifest.json"

# Sub-stream tags for per-scene RNG derivation.
_STREAM_SCENE = 0
_STREAM_VARIANTS = 1
_STREAM_NOISE = 2


@dataclass(frozen=True)
class HazeParams:
    """Atmospheric light (per channel, in (0, 1]) and scattering coefficient."""

    a: tuple[float, float, float]
    beta: float

    def __post_init__(self):
        a = tuple(float(c) for c in self.a)
        if len(a) != 3:
            raise InvalidInputError(f"atmospheric light needs 3 channels, got {len(a)}")
        if not all(np.isfinite(a)) or min(a) <= 0.0 or max(a) > 1.0:
            raise InvalidInputError(f"atmospheric light must lie in (0, 1], got {a}")
        if not np.isfinite(self.beta) or self.beta <= 0.0:
            raise InvalidInputError(f"scattering coefficient must be > 0, got {self.beta}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "beta", float(self.beta))

    def to_json(self) -> dict:
        return {"A": list(self.a), "beta": self.beta}

    @classmethod
    def from_json(cls, obj: dict) -> "HazeParams":
        return cls(a=tuple(obj["A"]), beta=obj["beta"])


@dataclass(frozen=True)
class SynthSpec:
    """Controls for procedural dataset generation.

    ``noise_sigma`` adds clipped Gaussian sensor noise to the hazy PNGs at
    write time (used for the pseudo-real domain stand-in); the in-memory
    scene groups stay exact.  ``variant_salt`` reseeds only the variant
    parameter draws, producing held-out haze renderings of the same
    scenes.  ``scene_prefix`` namespaces scene ids across datasets.
    """

    height: int = 80
    width: int = 80
    variants_per_scene: int = 4
    num_scenes: int = 20
    beta_range: tuple[float, float] = (0.4, 2.0)
    a_range: tuple[float, float] = (0.7, 1.0)
    seed: int = 0
    depth_max: float = 2.0
    noise_sigma: float = 0.0
    variant_salt: int = 0
    scene_prefix: str = "scene"

    def __post_init__(self):
        if self.variants_per_scene < 2:
            raise InvalidInputError("need at least 2 variants per scene")
        if self.num_scenes < 1:
            raise InvalidInputError("need at least 1 scene")
        lo, hi = self.beta_range
        if not (0.0 < lo <= hi):
            raise InvalidInputError(f"beta range must satisfy 0 < lo <= hi, got {self.beta_range}")
        alo, ahi = self.a_range
        if not (0.0 < alo <= ahi <= 1.0):
            raise InvalidInputError(f"A range must lie in (0, 1], got {self.a_range}")
        if self.height < 8 or self.width < 8:
            raise InvalidInputError("images must be at least 8x8")
        if self.depth_max <= 0 or self.noise_sigma < 0:
            raise InvalidInputError("depth_max must be > 0 and noise_sigma >= 0")

    def to_json(self) -> dict:
        return {
            "height": self.height,
            "width": self.width,
            "variants_per_scene": self.variants_per_scene,
            "num_scenes": self.num_scenes,
            "beta_range": list(self.beta_range),
            "a_range": list(self.a_range),
            "seed": self.seed,
            "depth_max": self.depth_max,
            "noise_sigma": self.noise_sigma,
            "variant_salt": self.variant_salt,
            "scene_prefix": self.scene_prefix,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SynthSpec":
        obj = dict(obj)
        for key in ("beta_range", "a_range"):
            if key in obj:
                obj[key] = tuple(obj[key])
        return cls(**obj)


@dataclass
class SceneGroup:
    """One clear image + depth map + n hazy variants with known parameters."""

    scene_id: str
    clear: np.ndarray  # (h, w, 3) float32 in [0, 1]
    depth: np.ndarray  # (h, w) float32 >= 0
    variants: list[tuple[HazeParams, np.ndarray]]

    def validate(self, atol: float = 1e-6) -> None:
        if len(self.variants) < 2:
            raise InvalidInputError("scene group needs at least 2 variants")
        h, w = self.depth.shape
        if self.clear.shape != (h, w, 3):
            raise ShapeError(f"clear {self.clear.shape} does not match depth {(h, w)}")
        params = [p for p, _ in self.variants]
        if len(set(params)) != len(params):
            raise InvalidInputError("variant parameters must be pairwise distinct")
        for p, hazy in self.variants:
            if hazy.shape != (h, w, 3):
                raise ShapeError(f"variant shape {hazy.shape} does not match {(h, w, 3)}")
            expected = apply_haze(self.clear, self.depth, p)
            if np.max(np.abs(expected - hazy)) > atol:
                raise InvalidInputError(f"variant of {self.scene_id} is not apply_haze(clear)")


def _check_depth(depth: np.ndarray) -> np.ndarray:
    depth = np.asarray(depth)
    if depth.ndim != 2:
        raise ShapeError(f"depth map must be 2-D, got shape {depth.shape}")
    if not np.isfinite(depth).all():
        raise InvalidInputError("depth map contains non-finite values")
    if (depth < 0).any():
        raise InvalidInputError("depth map contains negative values")
    return depth


def transmission(depth: np.ndarray, beta: float) -> np.ndarray:
    """Per-pixel transmission exp(-beta * depth); values in (0, 1]."""
    depth = _check_depth(depth)
    if not np.isfinite(beta) or beta <= 0:
        raise InvalidInputError(f"beta must be a positive finite scalar, got {beta}")
    return np.exp(-beta * depth)


def apply_haze(clear: np.ndarray, depth: np.ndarray, params: HazeParams) -> np.ndarray:
    """Render a hazy image: I = J * t + A * (1 - t), per channel.

    The result is a convex combination of the clear pixel and the
    atmospheric light, so it needs no clipping.
    """
    clear = np.asarray(clear)
    depth = _check_depth(depth)
    if clear.ndim != 3 or clear.shape[2] != 3:
        raise ShapeError(f"clear image must be (h, w, 3), got {clear.shape}")
    if clear.shape[:2] != depth.shape:
        raise ShapeError(f"image {clear.shape[:2]} and depth {depth.shape} disagree")
    if clear.min() < 0.0 or clear.max() > 1.0:
        raise InvalidInputError("clear image values must lie in [0, 1]")
    t = transmission(depth, params.beta)[..., None]
    a = np.asarray(params.a, dtype=clear.dtype)
    return clear * t + a * (1.0 - t)


def invert_haze(
    hazy: np.ndarray,
    depth: np.ndarray,
    params: HazeParams,
    t_min: float = 1e-3,
) -> np.ndarray:
    """Algebraic inverse of apply_haze with known parameters.

    J = (I - A * (1 - t)) / t with t floored at t_min; output clamped to
    [0, 1].  Exact wherever t >= t_min; a test oracle, not a learned path.
    """
    hazy = np.asarray(hazy)
    depth = _check_depth(depth)
    if not (0.0 < t_min < 1.0):
        raise InvalidInputError(f"t_min must lie in (0, 1), got {t_min}")
    if hazy.ndim != 3 or hazy.shape[2] != 3 or hazy.shape[:2] != depth.shape:
        raise ShapeError(f"hazy {hazy.shape} and depth {depth.shape} disagree")
    t = np.maximum(transmission(depth, params.beta), t_min)[..., None]
    a = np.asarray(params.a, dtype=hazy.dtype)
    return np.clip((hazy - a * (1.0 - t)) / t, 0.0, 1.0)


def _scene_rng(spec: SynthSpec, scene_id: str, stream: int, *extra: int) -> np.random.Generator:
    sid = int.from_bytes(hashlib.blake2s(scene_id.encode("utf-8")).digest()[:8], "big")
    return np.random.default_rng(np.random.SeedSequence([spec.seed, sid, stream, *extra]))


def _bilinear_resize(grid: np.ndarray, h: int, w: int) -> np.ndarray:
    """Resize a small 2-D grid to (h, w) with bilinear interpolation."""
    gh, gw = grid.shape
    ys = np.linspace(0.0, gh - 1.0, h)
    xs = np.linspace(0.0, gw - 1.0, w)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, gh - 1)
    x1 = np.minimum(x0 + 1, gw - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    top = grid[y0][:, x0] * (1 - fx) + grid[y0][:, x1] * fx
    bot = grid[y1][:, x0] * (1 - fx) + grid[y1][:, x1] * fx
    return top * (1 - fy) + bot * fy


def _dim_color(rng: np.random.Generator) -> np.ndarray:
    """Random color with one strongly suppressed channel.

    Keeps the dark-channel statistics of generated scenes close to
    natural haze-free images, where most patches have at least one low
    color channel.
    """
    color = rng.uniform(0.15, 0.95, size=3)
    color[rng.integers(0, 3)] *= rng.uniform(0.0, 0.25)
    return color


def _procedural_clear(rng: np.random.Generator, h: int, w: int) -> np.ndarray:
    corners = np.stack([_dim_color(rng) for _ in range(4)])  # tl, tr, bl, br
    fy = np.linspace(0.0, 1.0, h)[:, None, None]
    fx = np.linspace(0.0, 1.0, w)[None, :, None]
    top = corners[0] * (1 - fx) + corners[1] * fx
    bot = corners[2] * (1 - fx) + corners[3] * fx
    img = top * (1 - fy) + bot * fy

    yy, xx = np.mgrid[0:h, 0:w]
    for _ in range(int(rng.integers(6, 12))):
        color = _dim_color(rng)
        cy, cx = rng.uniform(0, h), rng.uniform(0, w)
        ry, rx = rng.uniform(0.06, 0.3) * h, rng.uniform(0.06, 0.3) * w
        if rng.random() < 0.5:
            mask = (np.abs(yy - cy) < ry) & (np.abs(xx - cx) < rx)
        else:
            mask = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 < 1.0
        img[mask] = color
    return np.clip(img, 0.0, 1.0).astype(np.float32)


def _procedural_depth(rng: np.random.Generator, h: int, w: int, depth_max: float) -> np.ndarray:
    fy = np.linspace(0.0, 1.0, h)[:, None]
    fx = np.linspace(0.0, 1.0, w)[None, :]
    gy, gx = rng.uniform(-1.0, 1.0, size=2)
    ramp = 0.5 + 0.5 * (gy * (fy - 0.5) + gx * (fx - 0.5))
    noise = _bilinear_resize(rng.standard_normal((5, 5)), h, w)
    field_ = ramp + 0.15 * noise
    field_ -= field_.min()
    peak = field_.max()
    if peak > 0:
        field_ /= peak
    return (depth_max * field_).astype(np.float32)


def _draw_variants(rng: np.random.Generator, spec: SynthSpec) -> list[HazeParams]:
    params: list[HazeParams] = []
    log_lo, log_hi = np.log(spec.beta_range[0]), np.log(spec.beta_range[1])
    while len(params) < spec.variants_per_scene:
        beta = float(np.exp(rng.uniform(log_lo, log_hi)))
        gray = float(rng.uniform(*spec.a_range))
        candidate = HazeParams(a=(gray, gray, gray), beta=beta)
        if candidate not in params:
            params.append(candidate)
    return params


def synth_scene(spec: SynthSpec, scene_id: str) -> SceneGroup:
    """Generate one scene group, deterministic in (spec.seed, scene_id)."""
    rng = _scene_rng(spec, scene_id, _STREAM_SCENE)
    clear = _procedural_clear(rng, spec.height, spec.width)
    depth = _procedural_depth(rng, spec.height, spec.width, spec.depth_max)
    vrng = _scene_rng(spec, scene_id, _STREAM_VARIANTS, spec.variant_salt)
    variants = [(p, apply_haze(clear, depth, p).astype(np.float32)) for p in _draw_variants(vrng, spec)]
    group = SceneGroup(scene_id=scene_id, clear=clear, depth=depth, variants=variants)
    group.validate()
    return group


def _sensor_noise(spec: SynthSpec, scene_id: str, image: np.ndarray, variant: int) -> np.ndarray:
    if spec.noise_sigma == 0.0:
        return image
    rng = _scene_rng(spec, scene_id, _STREAM_NOISE, variant)
    noisy = image + rng.normal(0.0, spec.noise_sigma, size=image.shape)
    return np.clip(noisy, 0.0, 1.0).astype(np.float32)


def scene_ids(spec: SynthSpec) -> list[str]:
    return [f"{spec.scene_prefix}_{i:04d}" for i in range(spec.num_scenes)]


def synth_dataset(spec: SynthSpec, out_dir: str | os.PathLike) -> dict:
    """Write a full dataset (PNG images, PFM depths, manifest.json).

    Returns the manifest as written.  Paths inside the manifest are
    relative to ``out_dir`` so the dataset can be relocated wholesale.
    """
    out = Path(out_dir)
    try:
        for sub in ("clear", "depth", "hazy"):
            (out / sub).mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"cannot create dataset directory {out}: {e}") from e

    scenes = []
    for sid in scene_ids(spec):
        group = synth_scene(spec, sid)
        clear_rel = f"clear/{sid}.png"
        depth_rel = f"depth/{sid}.pfm"
        save_png(out / clear_rel, group.clear)
        save_pfm(out / depth_rel, group.depth)
        variants = []
        for v, (params, hazy) in enumerate(group.variants):
            hazy_rel = f"hazy/{sid}_v{v}.png"
            save_png(out / hazy_rel, _sensor_noise(spec, sid, hazy, v))
            variants.append({"hazy_path": hazy_rel, **params.to_json()})
        scenes.append(
            {
                "scene_id": sid,
                "clear_path": clear_rel,
                "depth_path": depth_rel,
                "variants": variants,
            }
        )

    manifest = {"version": MANIFEST_VERSION, "seed": spec.seed, "scenes": scenes}
    with open(out / MANIFEST_NAME, "w") as f:
        json.dump(manifest, f, indent=1)
    return manifest


def hazy_paths(manifest: dict) -> list[str]:
    """All hazy image paths of a manifest, in scene/variant order."""
    return [v["hazy_path"] for scene in manifest["scenes"] for v in scene["variants"]]


def write_real_list(manifest: dict, out_dir: str | os.PathLike, name: str = "real_list.txt") -> Path:
    """Write the plain-text list of hazy paths consumed as the real domain."""
    out = Path(out_dir) / name
    out.write_text("".join(p + "\n" for p in hazy_paths(manifest)))
    return out
