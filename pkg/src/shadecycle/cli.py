"""Single command-line entry point: gen-data, train, eval, render, decompose, ablate.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric failure.
Every subcommand validates its inputs before touching the output directory.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np
import torch
from PIL import Image

from .checkpointing import load_checkpoint, restore_networks
from .config import load_config, save_config
from .data import generate_corpus, load_manifest
from .errors import ConfigError, DataError, NumericError
from .evaluation import evaluate_networks, load_extractor
from .grids import image_to_tile, save_grid, stack_to_tiles
from .networks import CHANNEL_SLICES, NETWORK_STRIDE, ablate_inputs
from .trainer import ablation_grid, fit


def _parse_resolution(text: str) -> tuple[int, int]:
    try:
        h, w = (int(v) for v in text.lower().split("x"))
    except ValueError as exc:
        raise ConfigError(f"resolution must look like 64x64, got {text!r}") from exc
    if h <= 0 or w <= 0 or h % NETWORK_STRIDE or w % NETWORK_STRIDE:
        raise ConfigError(f"resolution {text!r} must be positive and divisible by "
                          f"{NETWORK_STRIDE}")
    return h, w


def _parse_drop(text: str | None) -> tuple:
    if not text:
        return ()
    parts = tuple(sorted(p.strip().upper() for p in text.split(",") if p.strip()))
    unknown = set(parts) - set(CHANNEL_SLICES)
    if unknown:
        raise ConfigError(f"--drop takes a comma list of A/N/F, got {text!r}")
    return parts


def cmd_gen_data(args) -> int:
    if args.count <= 0:
        raise ConfigError(f"--count must be positive, got {args.count}")
    resolution = _parse_resolution(args.res)
    train_path, eval_path = generate_corpus(args.out, args.count, resolution, args.seed,
                                            eval_count=args.eval_count,
                                            real_dir=args.real_dir)
    print(train_path)
    print(eval_path)
    return 0


def cmd_train(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    if args.steps is not None:
        if args.steps <= 0:
            raise ConfigError("--steps must be positive")
        config = dataclasses.replace(config, max_steps=args.steps)
    out = Path(args.out)
    ckpt, _ = fit(config, args.data, out, resume=args.resume, quiet=args.quiet)
    save_config(config, out / "config.json")
    print(ckpt)
    return 0


def cmd_eval(args) -> int:
    extractor = load_extractor(args.extractor, dim=args.extractor_dim)
    payload = load_checkpoint(args.ckpt)
    manifest = load_manifest(args.data)
    if not manifest.by_kind("paired"):
        raise DataError(f"manifest {args.data} has no paired records "
                        "(point --data at the eval split)")
    renderer, decomposer, _, _ = restore_networks(payload)
    report = evaluate_networks(renderer, decomposer, manifest, extractor)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_json() + "\n")
    if args.grids:
        _eval_grid(renderer, decomposer, manifest, out.with_suffix(".png"))
    print(report.to_json())
    return 0


def _eval_grid(renderer, decomposer, manifest, path, k=4):
    from .data import paired_records

    pairs = paired_records(manifest)[:k]
    rows_top, rows_bot = [], []
    with torch.no_grad():
        for m, img in pairs:
            stack = torch.from_numpy(m.to_network()[None]).float()
            pix = torch.from_numpy(np.moveaxis(img.pixels, -1, 0)[None]).float()
            rendered = renderer(stack)[0].numpy()
            decomposed = decomposer(pix)[0].numpy()
            rows_top.append(stack_to_tiles(stack[0].numpy()) + [image_to_tile(np.moveaxis(img.pixels, -1, 0))])
            rows_bot.append(stack_to_tiles(decomposed) + [image_to_tile(rendered)])
    save_grid(path, rows_top + rows_bot)


def cmd_render(args) -> int:
    drop = _parse_drop(args.drop)
    payload = load_checkpoint(args.ckpt)
    manifest = load_manifest(args.data)
    record = manifest.record(args.id)
    if record.kind == "real":
        raise DataError(f"record {args.id!r} is a real image, not intrinsics")
    maps = manifest.load_intrinsics(record)
    renderer, _, _, _ = restore_networks(payload)
    renderer.eval()
    stack = torch.from_numpy(maps.to_network()[None]).float()
    stack = ablate_inputs(stack, drop)
    with torch.no_grad():
        rendered = renderer(stack)[0].numpy()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    arr = np.round(image_to_tile(rendered) * 255.0).astype(np.uint8)
    Image.fromarray(arr, mode="RGB").save(out)
    print(out)
    return 0


def _load_image_letterboxed(path: Path, resolution: tuple[int, int]) -> np.ndarray:
    """RGB file -> (3, H, W) in [-1, 1], aspect preserved, gray padding."""
    if not path.exists():
        raise DataError(f"missing image: {path}")
    try:
        img = Image.open(path).convert("RGB")
    except Exception as exc:
        raise DataError(f"cannot decode image {path}: {exc}") from exc
    th, tw = resolution
    scale = min(th / img.height, tw / img.width)
    nh, nw = max(int(round(img.height * scale)), 1), max(int(round(img.width * scale)), 1)
    img = img.resize((nw, nh), Image.BILINEAR)
    canvas = np.full((th, tw, 3), 0.5)
    y0, x0 = (th - nh) // 2, (tw - nw) // 2
    canvas[y0:y0 + nh, x0:x0 + nw] = np.asarray(img, dtype=np.float64) / 255.0
    return np.moveaxis(canvas * 2.0 - 1.0, -1, 0)


def cmd_decompose(args) -> int:
    payload = load_checkpoint(args.ckpt)
    config = payload["config"]
    pixels = _load_image_letterboxed(Path(args.image), tuple(config.resolution))
    _, decomposer, _, _ = restore_networks(payload)
    decomposer.eval()
    with torch.no_grad():
        stack = decomposer(torch.from_numpy(pixels[None]).float())[0].numpy()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    albedo, normals, refl = stack_to_tiles(stack)
    # display encoding for normals: renormalize, then map to [0,1]
    n = np.moveaxis(stack[3:6], 0, -1)
    n = n / np.maximum(np.linalg.norm(n, axis=-1, keepdims=True), 1e-9)
    normals = n * 0.5 + 0.5
    for name, tile in (("albedo", albedo), ("normal", normals), ("refl", refl)):
        arr = np.round(np.clip(tile, 0, 1) * 255.0).astype(np.uint8)
        Image.fromarray(arr, mode="RGB").save(out / f"{name}.png")
    save_grid(out / "grid.png", [[image_to_tile(pixels), albedo, normals, refl]])
    print(out)
    return 0


def cmd_ablate(args) -> int:
    base = load_config(args.config)
    grid = ablation_grid(base)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = ["full", "no_shared_disc", "no_dec_cycle", "wo_A", "wo_N", "wo_F"]
    for name, cfg in zip(names, grid):
        save_config(cfg, out / f"{name}.json")
        print(out / f"{name}.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shadecycle")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="emit the analytic training corpus + eval split")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--res", default="64x64")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--eval-count", type=int, default=None)
    p.add_argument("--real-dir", default=None,
                   help="import real records from a directory of RGB images")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="run the training loop")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--resume", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a checkpoint on a paired eval manifest")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--extractor", default="random")
    p.add_argument("--extractor-dim", type=int, default=32)
    p.add_argument("--out", required=True)
    p.add_argument("--grids", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("render", help="render one intrinsic record with a checkpoint")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--id", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--drop", default=None, help="comma list of A/N/F channels to zero")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("decompose", help="predict intrinsic maps for an RGB image")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("ablate", help="emit the six benchmark config files")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ablate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
