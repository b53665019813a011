"""Command line front end: synth | run | eval | bench.

synth writes an annotated sequence (PPM frames, PGM label masks, JSON
manifest), run propagates the first mask through the frames, eval scores
predictions against ground truth, bench times the correlation kernel.
run/eval/bench write JSON reports; eval and bench also render CSV tables
and PNG figures next to them.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .bench import DEFAULT_CASES, BenchCase, bench_correlate
from .encoder import EncoderConfig
from .imageio import read_json, read_pgm, read_ppm, write_json, write_pgm, write_ppm
from .metrics import evaluate_sequence
from .propagate import PropagationConfig, run_sequence
from .read import UNIFORM
from .report import save_bench_report, save_eval_report
from .scenes import TwinSceneSpec, static_encoder, static_scene, twin_encoder, twin_scene
from .synth import HideSeekConfig, hide_and_seek, synth_sequence


def _blob_base(height: int, width: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic textured base frame: one warm blob on a cool ramp.

    The background has no red at all and the blob no blue, so under a
    4-deep key the two stay far apart in descriptor space; the blob is
    large relative to the cell grid because the descriptor read needs
    the object to dominate its own neighborhood.
    """
    rng = np.random.default_rng((seed, 11))
    ys = np.linspace(0.0, 1.0, height)[:, None]
    xs = np.linspace(0.0, 1.0, width)[None, :]
    img = np.zeros((height, width, 3), dtype=np.float64)
    img[:, :, 1] = 70 + 50 * xs
    img[:, :, 2] = 130 + 70 * ys
    img[:, :, 1:] += rng.integers(-12, 13, size=(height, width, 2))
    cy, cx = height / 2.0, width / 2.0
    ry, rx = height / 3.0, width / 3.0
    yy = (np.arange(height)[:, None] - cy) / ry
    xx = (np.arange(width)[None, :] - cx) / rx
    blob = yy * yy + xx * xx <= 1.0
    warm = np.zeros((height, width, 3), dtype=np.float64)
    warm[:, :, 0] = 200 + rng.integers(-15, 16, size=(height, width))
    warm[:, :, 1] = 90 + rng.integers(-15, 16, size=(height, width))
    img[blob] = warm[blob]
    mask = blob.astype(np.uint8)
    return np.clip(img, 0, 255).astype(np.uint8), mask


def _occlude_frames(
    images: np.ndarray, masks: np.ndarray, seed: int, config: HideSeekConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Apply grid hiding to every frame after the first."""
    out_imgs = images.copy()
    out_msks = masks.copy()
    for t in range(1, images.shape[0]):
        rng = np.random.default_rng((seed, t, 1))
        out_imgs[t], out_msks[t], _ = hide_and_seek(images[t], masks[t], rng, config)
    return out_imgs, out_msks


def _cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    occ = HideSeekConfig(grid=args.hide_grid, hide_prob=args.hide_prob)
    if args.scene == "warp":
        base_img, base_mask = _blob_base(args.height, args.width, args.seed)
        images, masks, _ = synth_sequence(
            base_img,
            base_mask,
            args.frames,
            args.seed,
            occlusion=occ if args.hide_prob > 0 else None,
        )
        enc = EncoderConfig(stride=8, key_dim=4)
    elif args.scene == "twin":
        spec = TwinSceneSpec(n_frames=args.frames)
        images, masks = twin_scene(spec)
        enc = twin_encoder(spec)
        if args.hide_prob > 0:
            images, masks = _occlude_frames(images, masks, args.seed, occ)
    else:
        images, masks = static_scene()
        enc = static_encoder()
        if args.hide_prob > 0:
            images, masks = _occlude_frames(images, masks, args.seed, occ)

    frame_files, mask_files = [], []
    for t in range(images.shape[0]):
        fname, mname = f"frame_{t:04d}.ppm", f"mask_{t:04d}.pgm"
        write_ppm(out / fname, images[t])
        write_pgm(out / mname, masks[t].astype(np.uint8))
        frame_files.append(fname)
        mask_files.append(mname)
    manifest = {
        "scene": args.scene,
        "seed": args.seed,
        "n_frames": int(images.shape[0]),
        "height": int(images.shape[1]),
        "width": int(images.shape[2]),
        "hide_prob": args.hide_prob,
        "hide_grid": args.hide_grid,
        "stride": enc.stride,
        "key_dim": enc.key_dim,
        "frames": frame_files,
        "masks": mask_files,
    }
    write_json(out / "manifest.json", manifest)
    print(f"wrote {images.shape[0]} frames ({args.scene}) to {out}")
    return 0


def _load_sequence(in_dir: Path) -> tuple[np.ndarray, np.ndarray, dict]:
    manifest = {}
    mpath = in_dir / "manifest.json"
    if mpath.exists():
        manifest = read_json(mpath)
    frame_paths = sorted(in_dir.glob("frame_*.ppm"))
    if not frame_paths:
        raise FileNotFoundError(f"no frame_*.ppm files in {in_dir}")
    images = np.stack([read_ppm(p) for p in frame_paths])
    first_mask = read_pgm(in_dir / "mask_0000.pgm")
    return images, first_mask, manifest


def _cmd_run(args) -> int:
    in_dir, out = Path(args.input), Path(args.out)
    images, first_mask, manifest = _load_sequence(in_dir)
    stride = args.stride if args.stride else manifest.get("stride", 16)
    key_dim = args.key_dim if args.key_dim else manifest.get("key_dim", 12)
    sigma = UNIFORM if args.sigma == UNIFORM else float(args.sigma)
    config = PropagationConfig(
        mode=args.mode,
        sigma=sigma,
        encoder=EncoderConfig(stride=stride, key_dim=key_dim),
        mem_stride=args.mem_stride,
        upsample=args.upsample,
    )
    masks, report = run_sequence(images, first_mask, config)
    out.mkdir(parents=True, exist_ok=True)
    pred_files = []
    for t in range(masks.shape[0]):
        name = f"pred_{t:04d}.pgm"
        write_pgm(out / name, masks[t])
        pred_files.append(name)
    report["input"] = str(in_dir)
    report["predictions"] = pred_files
    write_json(out / "report.json", report)
    mean_ms = float(np.mean([row["per_frame_ms"] for row in report["frames"]]))
    print(
        f"propagated {masks.shape[0]} frames with mode={args.mode} "
        f"sigma={sigma} ({mean_ms:.1f} ms/frame) to {out}"
    )
    return 0


def _cmd_eval(args) -> int:
    pred_dir = Path(args.pred)
    truth_dir = Path(args.truth)
    out = Path(args.out) if args.out else pred_dir
    pred_paths = sorted(pred_dir.glob("pred_*.pgm"))
    truth_paths = sorted(truth_dir.glob("mask_*.pgm"))
    if not pred_paths:
        raise FileNotFoundError(f"no pred_*.pgm files in {pred_dir}")
    if len(pred_paths) != len(truth_paths):
        raise ValueError(
            f"{len(pred_paths)} predictions vs {len(truth_paths)} ground-truth masks"
        )
    pred = np.stack([read_pgm(p) for p in pred_paths])
    truth = np.stack([read_pgm(p) for p in truth_paths])
    scores = evaluate_sequence(pred, truth)
    paths = save_eval_report(out, scores)
    print(
        f"J_mean={scores['J_mean']:.4f} F_mean={scores['F_mean']:.4f} "
        f"global={scores['global_mean']:.4f}"
    )
    print("wrote " + ", ".join(str(p) for p in paths))
    return 0


def _parse_cases(text: str) -> list[BenchCase]:
    cases = []
    for part in text.split(","):
        dims = part.strip().lower().split("x")
        if len(dims) != 4:
            raise argparse.ArgumentTypeError(
                f"case {part!r} must look like TxHxWxD, e.g. 2x16x16x12"
            )
        t, h, w, d = (int(v) for v in dims)
        cases.append(BenchCase(t, h, w, d))
    return cases


def _cmd_bench(args) -> int:
    cases = args.cases if args.cases is not None else list(DEFAULT_CASES)
    result = bench_correlate(cases, reps=args.reps, seed=args.seed)
    paths = save_bench_report(args.out, result)
    for row in result["cases"]:
        print(
            f"{row['case']}: min {row['min_ms']:.2f} ms, "
            f"median {row['median_ms']:.2f} ms (rel err {row['max_rel_err']:.1e})"
        )
    print("wrote " + ", ".join(str(p) for p in paths))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kmnseg",
        description="Mask propagation on synthetic sequences via kernelized memory reads.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate an annotated synthetic sequence")
    p_synth.add_argument("--out", required=True, help="output directory")
    p_synth.add_argument(
        "--scene",
        choices=("warp", "twin", "static"),
        default="warp",
        help="warp: affine-jittered blob; twin: look-alike distractor; static: constant frames",
    )
    p_synth.add_argument("--frames", type=int, default=8)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--height", type=int, default=192, help="warp scene height")
    p_synth.add_argument("--width", type=int, default=256, help="warp scene width")
    p_synth.add_argument("--hide-prob", type=float, default=0.0, help="per-cell hide probability")
    p_synth.add_argument("--hide-grid", type=int, default=24, help="occlusion grid size")
    p_synth.set_defaults(func=_cmd_synth)

    p_run = sub.add_parser("run", help="propagate the first mask through a sequence")
    p_run.add_argument("--input", required=True, help="directory with frames and mask_0000.pgm")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--mode", choices=("stm", "kmn"), default="kmn")
    p_run.add_argument(
        "--sigma", default="7.0", help=f"kernel bandwidth in cells, or '{UNIFORM}'"
    )
    p_run.add_argument("--stride", type=int, default=0, help="cell size; 0 = from manifest")
    p_run.add_argument("--key-dim", type=int, default=0, help="key depth; 0 = from manifest")
    p_run.add_argument("--mem-stride", type=int, default=5)
    p_run.add_argument("--upsample", choices=("nearest", "bilinear"), default="nearest")
    p_run.set_defaults(func=_cmd_run)

    p_eval = sub.add_parser("eval", help="score predictions against ground truth")
    p_eval.add_argument("--pred", required=True, help="directory with pred_*.pgm")
    p_eval.add_argument("--truth", required=True, help="directory with mask_*.pgm")
    p_eval.add_argument("--out", default="", help="report directory (default: --pred)")
    p_eval.set_defaults(func=_cmd_eval)

    p_bench = sub.add_parser("bench", help="time the correlation kernel")
    p_bench.add_argument("--out", required=True, help="report directory")
    p_bench.add_argument("--reps", type=int, default=5)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument(
        "--cases", type=_parse_cases, default=None,
        help="comma-separated TxHxWxD sizes, e.g. 2x16x16x12",
    )
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
