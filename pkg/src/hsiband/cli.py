"""Command-line front end: ``hsiband {inspect,select,sweep,synth,export}``.

Every successful run writes ``<output>.manifest.json`` listing the resolved
parameters, SHA-256 digests of the inputs and the files produced.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .datamodel import (
    SyntheticSpec,
    generate_synthetic,
    load_cube,
    load_ground_truth,
    raw_path_for,
    write_cube,
    write_ground_truth,
)
from .errors import HsiError
from .evaluation import (
    DEFAULT_THRESHOLDS,
    export_sparse,
    format_number,
    stratified_split,
    sweep,
    sweep_csv,
)
from .glcm import GlcmParams
from .selection import SelectionConfig, band_scores, greedy_select

logger = logging.getLogger("hsiband")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("threshold list is empty")
    return values


def _offset(text: str) -> tuple[int, int]:
    parts = _int_list(text)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("offset must be 'drow,dcol'")
    return parts[0], parts[1]


def _add_data_args(p):
    p.add_argument("--cube", required=True, help="cube header file")
    p.add_argument("--gt", required=True, help="ground-truth CSV grid")


def _add_metric_args(p):
    p.add_argument("--levels", type=int, default=17, help="MI quantization levels (default 17)")
    p.add_argument("--glcm-levels", type=int, default=8)
    p.add_argument("--glcm-offset", type=_offset, default=(0, 1), metavar="DROW,DCOL")
    p.add_argument("--glcm-asymmetric", action="store_true",
                   help="count each pixel pair once instead of both ways")
    p.add_argument("--labeled-only", action="store_true",
                   help="compute MI over labelled pixels only")


def _add_selection_args(p):
    p.add_argument("--criterion", choices=["mi", "homogeneity"], default="mi")
    p.add_argument("--max-bands", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hsiband", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("inspect", help="per-band MI and homogeneity as CSV")
    _add_data_args(p)
    _add_metric_args(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("select", help="greedy band selection, JSON report")
    _add_data_args(p)
    _add_metric_args(p)
    _add_selection_args(p)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep", help="threshold sweep with 1-NN accuracy, CSV")
    _add_data_args(p)
    _add_metric_args(p)
    _add_selection_args(p)
    p.add_argument("--thresholds", type=_float_list, default=list(DEFAULT_THRESHOLDS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fraction", type=float, default=0.5, help="training fraction per class")
    p.add_argument("--snapshots", type=_int_list, default=None,
                   help="only report these subset sizes (default: every acceptance)")
    p.add_argument("--no-eval", action="store_true", help="skip classification")
    p.add_argument("--out", required=True)

    p = sub.add_parser("synth", help="write a planted synthetic cube and ground truth")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--signal", type=int, required=True)
    p.add_argument("--noise", type=int, default=0)
    p.add_argument("--redundant", type=int, default=0)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix", required=True)

    p = sub.add_parser("export", help="write train/test files in 'label idx:value' format")
    _add_data_args(p)
    p.add_argument("--bands", type=_int_list, required=True, help="comma-separated band indices")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fraction", type=float, default=0.5)
    p.add_argument("--out-prefix", required=True)
    return parser


def _digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _input_files(args) -> list[Path]:
    files = []
    if getattr(args, "cube", None):
        files += [Path(args.cube), raw_path_for(args.cube)]
    if getattr(args, "gt", None):
        files.append(Path(args.gt))
    return files


def _write_manifest(args, outputs: list[Path], manifest_path: Path) -> Path:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "verbose")}
    params = {k: list(v) if isinstance(v, tuple) else v for k, v in params.items()}
    manifest = {
        "command": args.command,
        "version": __version__,
        "parameters": params,
        "inputs": {str(p): _digest(p) for p in _input_files(args)},
        "outputs": [str(p) for p in outputs] + [str(manifest_path)],
        "seed": params.get("seed"),
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
    return manifest_path


def _config(args, threshold=0.0) -> SelectionConfig:
    glcm = GlcmParams(args.glcm_levels, args.glcm_offset, not args.glcm_asymmetric)
    return SelectionConfig(
        criterion=getattr(args, "criterion", "mi"),
        threshold=threshold,
        levels=args.levels,
        glcm=glcm,
        max_bands=getattr(args, "max_bands", None),
        labeled_only=args.labeled_only,
    )


def _load(args):
    cube = load_cube(args.cube)
    gt = load_ground_truth(args.gt)
    gt.check_pairs_with(cube)
    return cube, gt


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)


def cmd_inspect(args) -> list[Path]:
    cube, gt = _load(args)
    mi_cfg = _config(args)
    mi = band_scores(cube, gt, mi_cfg)
    hom = band_scores(cube, gt, replace(mi_cfg, criterion="homogeneity"))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["band", "mi_bits", "homogeneity"])
    for b in range(cube.bands):
        w.writerow([b, format_number(mi[b]), format_number(hom[b])])
    out = Path(args.out)
    _write_atomic(out, buf.getvalue())
    return [out]


def cmd_select(args) -> list[Path]:
    cube, gt = _load(args)
    report = greedy_select(cube, gt, _config(args, args.threshold))
    out = Path(args.out)
    _write_atomic(out, report.to_json())
    logger.info("selected %d of %d bands: %s", len(report.selected), cube.bands, report.selected)
    return [out]


def cmd_sweep(args) -> list[Path]:
    cube, gt = _load(args)
    split = None if args.no_eval else stratified_split(gt, args.fraction, args.seed)
    rows, _ = sweep(cube, gt, args.thresholds, _config(args), split,
                    snapshot_sizes=args.snapshots, evaluate=not args.no_eval)
    out = Path(args.out)
    _write_atomic(out, sweep_csv(rows))
    return [out]


def cmd_synth(args) -> list[Path]:
    spec = SyntheticSpec(args.rows, args.cols, args.classes, args.signal, args.noise,
                         args.redundant, args.sigma, args.seed)
    cube, gt = generate_synthetic(spec)
    prefix = Path(args.out_prefix)
    hdr, raw = write_cube(cube, prefix.with_name(prefix.name + ".hdr"))
    gt_path = write_ground_truth(gt, prefix.with_name(prefix.name + "_gt.csv"))
    return [hdr, raw, gt_path]


def cmd_export(args) -> list[Path]:
    cube, gt = _load(args)
    bad = [b for b in args.bands if not 0 <= b < cube.bands]
    if bad:
        raise UsageError(f"band index {bad[0]} out of range for {cube.bands}-band cube")
    split = stratified_split(gt, args.fraction, args.seed)
    prefix = Path(args.out_prefix)
    return list(export_sparse(cube, gt, args.bands, split,
                              prefix.with_name(prefix.name + ".train"),
                              prefix.with_name(prefix.name + ".test")))


COMMANDS = {
    "inspect": cmd_inspect,
    "select": cmd_select,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
    "export": cmd_export,
}


def _manifest_path(args, outputs: list[Path]) -> Path:
    if args.command in ("synth", "export"):
        prefix = Path(args.out_prefix)
        return prefix.with_name(prefix.name + ".manifest.json")
    return outputs[0].with_name(outputs[0].name + ".manifest.json")


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        outputs = COMMANDS[args.command](args)
        _write_manifest(args, outputs, _manifest_path(args, outputs))
    except UsageError as exc:
        print(f"hsiband {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (HsiError, OSError, ValueError) as exc:
        print(f"hsiband {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
