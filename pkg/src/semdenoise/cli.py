"""Command-line front end.

Subcommands mirror the processing steps: inspect an autocorrelation curve,
estimate SNR, inject noise, filter, build a dataset, train the pipeline,
run it on an image, and reproduce the two benchmark tables. Every command
writes machine-readable CSV/JSON (and figures on the report paths) into
--out-dir and prints a short human summary.

Exit codes: 0 success, 1 usage error, 2 the input data could not be
processed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import acf as acf_mod
from . import pipeline as pl
from .errors import DataError
from .filters import FILTER_NAMES, FilterConfig, apply_filter
from .image import (
    GrayImage,
    NoiseSpec,
    SYNTHETIC_KINDS,
    add_awgn,
    load_pgm,
    make_synthetic,
    save_pgm,
)
from .snr import METHODS, estimate_snr
from .stats import format_ttest_report, mse, paired_t_test, psnr, ssim

CONFIG_VERSION = 1

_DEFAULT_LEVELS = [round(0.001 * k, 10) for k in range(1, 11)]


def _parse_levels(text: str) -> list:
    try:
        levels = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad noise level list {text!r}")
    if not levels:
        raise argparse.ArgumentTypeError("empty noise level list")
    return levels


def _parse_size(text: str) -> tuple:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size {text!r}, expected WxH")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semdenoise",
        description="Single-image noise estimation and adaptive filtering.")
    parser.add_argument("--seed", type=int, default=0,
                        help="base seed for every random stream")
    parser.add_argument("--out-dir", default=".",
                        help="directory for output files")
    parser.add_argument("--config", default=None,
                        help="JSON file with default option values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("acf", help="autocorrelation curve of an image")
    p.add_argument("--image", required=True)
    p.add_argument("--max-lag", type=int, default=acf_mod.DEFAULT_MAX_LAG)
    p.add_argument("--plot", action="store_true",
                   help="also render the curve to acf.png")

    p = sub.add_parser("snr", help="estimate SNR from one image")
    p.add_argument("--image", required=True)
    p.add_argument("--method", default="lsr", choices=METHODS + ("all",))

    p = sub.add_parser("noise", help="noise injection")
    noise_sub = p.add_subparsers(dest="noise_command", required=True)
    p = noise_sub.add_parser("add", help="add seeded white Gaussian noise")
    p.add_argument("--image", required=True)
    p.add_argument("--nv", type=float, required=True,
                   help="noise variance to inject")
    p.add_argument("--stream", type=int, default=1,
                   help="noise stream index (vary for repeats)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("filter", help="denoise an image")
    p.add_argument("--image", required=True)
    p.add_argument("--filter", required=True, choices=FILTER_NAMES,
                   dest="filter_name")
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--nv", type=float, default=0.0,
                   help="noise variance for the wiener/gaussian filters")
    p.add_argument("--boundary", default="symmetric",
                   choices=("symmetric", "replicate"))
    p.add_argument("--reference", default=None,
                   help="clean image for quality metrics")
    p.add_argument("--out", required=True)

    p = sub.add_parser("dataset", help="dataset harness")
    ds_sub = p.add_subparsers(dest="dataset_command", required=True)
    p = ds_sub.add_parser("gen", help="generate a labelled feature dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--images", default=None,
                   help="directory of clean .pgm files (default: synthetic)")
    p.add_argument("--synthetic", type=int, default=10,
                   help="number of synthetic images when --images is absent")
    p.add_argument("--size", type=_parse_size, default=(64, 64),
                   help="synthetic image size WxH")
    p.add_argument("--levels", type=_parse_levels, default=_DEFAULT_LEVELS)
    p.add_argument("--seeds-per-level", type=int, default=5)

    p = sub.add_parser("train", help="tune the noise-variance regressor")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--budget", type=int, default=pl.DEFAULT_TUNE_BUDGET)
    p.add_argument("--feature-spec", default="snr_db",
                   choices=pl.FEATURE_SPECS)
    p.add_argument("--report", default=None,
                   help="metrics CSV path (default out-dir/train_report.csv)")

    p = sub.add_parser("run", help="estimate noise variance and filter")
    p.add_argument("--image", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--out", required=True, help="filtered PGM path")
    p.add_argument("--report", default=None,
                   help="report JSON path (default out-dir/report.json)")

    p = sub.add_parser("bench", help="benchmark harnesses")
    bench_sub = p.add_subparsers(dest="bench_command", required=True)
    p = bench_sub.add_parser("snr", help="estimator accuracy per noise level")
    p.add_argument("--from-table", default=None,
                   help="existing benchmark CSV; only rerun the t-tests")
    p.add_argument("--images", default=None)
    p.add_argument("--synthetic", type=int, default=10)
    p.add_argument("--size", type=_parse_size, default=(64, 64))
    p.add_argument("--levels", type=_parse_levels, default=_DEFAULT_LEVELS)
    p.add_argument("--seeds-per-level", type=int, default=3)
    p = bench_sub.add_parser("filters", help="filtering quality per noise level")
    p.add_argument("--model", required=True)
    p.add_argument("--images", default=None)
    p.add_argument("--synthetic", type=int, default=10)
    p.add_argument("--size", type=_parse_size, default=(64, 64))
    p.add_argument("--levels", type=_parse_levels, default=_DEFAULT_LEVELS)
    p.add_argument("--seeds-per-level", type=int, default=2)
    p.add_argument("--window", type=int, default=3)

    p = sub.add_parser("ttest", help="paired t-test between two CSV columns")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--x-col", default=None)
    p.add_argument("--y-col", default=None)
    p.add_argument("--alpha", type=float, default=0.05)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list) -> None:
    """Pull defaults from a --config JSON file before parsing."""
    path = None
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif arg.startswith("--config="):
            path = arg.split("=", 1)[1]
    if path is None:
        return
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"--config: no such file {path!r}")
    except json.JSONDecodeError as exc:
        raise DataError(f"--config: bad JSON in {path!r}: {exc}")
    if not isinstance(payload, dict):
        raise DataError("--config: top level must be an object")
    if payload.get("version") != CONFIG_VERSION:
        raise DataError(f"--config: unsupported version {payload.get('version')!r}")
    defaults = payload.get("defaults", {})
    if not isinstance(defaults, dict):
        raise DataError("--config: 'defaults' must be an object")
    parser.set_defaults(**{k.replace("-", "_"): v for k, v in defaults.items()})
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            sp.set_defaults(**{k.replace("-", "_"): v
                               for k, v in defaults.items()})
            if sp._subparsers is not None:
                for a2 in sp._subparsers._group_actions:
                    for sp2 in a2.choices.values():
                        sp2.set_defaults(**{k.replace("-", "_"): v
                                            for k, v in defaults.items()})


class UsageError(Exception):
    """Bad flags or a missing file; maps to exit code 1."""


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_image(path: str) -> GrayImage:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"--image: no such file {path!r}")
    return load_pgm(p)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n",
                    encoding="ascii")


def _load_corpus(args) -> list:
    if args.images is not None:
        directory = Path(args.images)
        if not directory.is_dir():
            raise UsageError(f"--images: not a directory {args.images!r}")
        paths = sorted(directory.glob("*.pgm"))
        if not paths:
            raise DataError(f"no .pgm files in {args.images!r}")
        return [(p.stem, load_pgm(p)) for p in paths]
    width, height = args.size
    return pl.synthetic_corpus(args.synthetic, width, height, seed=args.seed)


# ---------------------------------------------------------------------------
# subcommand bodies


def _cmd_acf(args) -> int:
    image = _load_image(args.image)
    curve = acf_mod.compute_acf(image, args.max_lag)
    out = _out_dir(args)
    (out / "acf.csv").write_text(acf_mod.acf_to_csv(curve), encoding="ascii")
    if args.plot:
        from .plots import plot_acf
        plot_acf(curve, out / "acf.png")
    drop = curve.value(0) - curve.value(1)
    print(f"autocorrelation over lags 0..{curve.max_lag} -> {out / 'acf.csv'}")
    print(f"h(0) = {curve.value(0):.6g}, h(1) = {curve.value(1):.6g}, "
          f"lag-zero drop = {drop:.6g}")
    print(f"image mean {curve.mean:.6g}, squared mean {curve.mean_sq:.6g}")
    return 0


def _cmd_snr(args) -> int:
    image = _load_image(args.image)
    curve = acf_mod.compute_acf(image, acf_mod.usable_max_lag(image))
    methods = METHODS if args.method == "all" else (args.method,)
    results = {}
    for method in methods:
        est = estimate_snr(curve, method)
        results[method] = {"snr_db": est.snr_db, "snr_linear": est.snr_linear,
                           "peak_estimate": est.peak_estimate}
        print(f"{method}: snr {est.snr_db:.4f} dB "
              f"(linear {est.snr_linear:.6g}, peak {est.peak_estimate:.6g})")
    _write_json(_out_dir(args) / "snr.json", results)
    return 0


def _cmd_noise_add(args) -> int:
    image = _load_image(args.image)
    spec = NoiseSpec(args.nv, seed=args.seed, stream=args.stream)
    noisy = add_awgn(image, spec)
    save_pgm(noisy, args.out)
    _write_json(_out_dir(args) / "noise.json",
                {"nv": args.nv, "seed": args.seed, "stream": args.stream,
                 "out": str(args.out)})
    print(f"added white gaussian noise, variance {args.nv:g} "
          f"(seed {args.seed}, stream {args.stream}) -> {args.out}")
    return 0


def _cmd_filter(args) -> int:
    image = _load_image(args.image)
    config = FilterConfig(window=args.window, noise_variance=args.nv,
                          boundary=args.boundary)
    filtered = apply_filter(args.filter_name, image, config)
    save_pgm(filtered, args.out)
    payload = {"filter": args.filter_name, "window": args.window,
               "nv": args.nv, "boundary": args.boundary, "out": str(args.out)}
    print(f"{args.filter_name} filter (window {args.window}, nv {args.nv:g}) "
          f"-> {args.out}")
    if args.reference:
        clean = load_pgm(args.reference)
        payload["mse_pre"] = mse(image, clean)
        payload["mse_post"] = mse(filtered, clean)
        payload["psnr_post"] = psnr(filtered, clean)
        payload["ssim_post"] = ssim(filtered, clean)
        print(f"mse vs reference: {payload['mse_pre']:.6g} before, "
              f"{payload['mse_post']:.6g} after")
    _write_json(_out_dir(args) / "filter.json", payload)
    return 0


def _cmd_dataset_gen(args) -> int:
    corpus = _load_corpus(args)
    dataset = pl.generate_dataset(corpus, args.levels, args.seeds_per_level,
                                  base_seed=args.seed)
    Path(args.out).write_text(pl.dataset_to_csv(dataset), encoding="ascii")
    print(f"{dataset.n_rows} rows ({len(corpus)} images x "
          f"{len(args.levels)} levels x {args.seeds_per_level} seeds, "
          f"{len(dataset.skipped)} skipped) -> {args.out}")
    for image_id, nv, stream, reason in dataset.skipped:
        print(f"  skipped {image_id} nv={nv:g} stream={stream}: {reason}")
    return 0


def _cmd_train(args) -> int:
    path = Path(args.dataset)
    if not path.exists():
        raise UsageError(f"--dataset: no such file {args.dataset!r}")
    dataset = pl.dataset_from_csv(path.read_text(encoding="ascii"))
    result = pl.train_pipeline(dataset, tuning_budget=args.budget,
                               seed=args.seed, feature_spec=args.feature_spec)
    pl.save_pipeline(result.model, args.out)
    report_path = Path(args.report) if args.report \
        else _out_dir(args) / "train_report.csv"
    report_path.write_text(pl.train_report_to_csv(result.report),
                           encoding="ascii")
    m = result.test_metrics
    print(f"tuned regressor on {result.report.n_train} rows, "
          f"tested on {result.report.n_test}")
    print(f"cross-validated rmse {result.report.cv_rmse:.6g} "
          f"(winner {json.dumps(result.report.best_config, sort_keys=True)})")
    print(f"test rmse {m.rmse:.6g}, r^2 {m.r_squared:.4f}, mae {m.mae:.6g}")
    print(f"model -> {args.out}, metrics -> {report_path}")
    return 0


def _cmd_run(args) -> int:
    image = _load_image(args.image)
    model_path = Path(args.model)
    if not model_path.exists():
        raise UsageError(f"--model: no such file {args.model!r}")
    model = pl.load_pipeline(model_path)
    filtered, report = pl.run_aogprllsr(image, model, window=args.window)
    save_pgm(filtered, args.out)
    report_path = Path(args.report) if args.report \
        else _out_dir(args) / "report.json"
    payload = pl.run_report_to_dict(report)
    # timings vary run to run; keep the report file byte-stable
    seconds = payload.pop("seconds")
    _write_json(report_path, payload)
    flavor = " (fallback estimate)" if report.used_fallback else ""
    print(f"snr {report.snr_db:.4f} dB, estimated noise variance "
          f"{report.estimated_nv:.6g}{flavor}")
    print(f"stage seconds: " + ", ".join(
        f"{k} {v:.4f}" for k, v in seconds.items()))
    print(f"filtered image -> {args.out}, report -> {report_path}")
    return 0


def _cmd_bench_snr(args) -> int:
    out = _out_dir(args)
    if args.from_table:
        path = Path(args.from_table)
        if not path.exists():
            raise UsageError(f"--from-table: no such file {args.from_table!r}")
        table = pl.snr_table_from_csv(path.read_text(encoding="ascii"))
        ttests = pl.snr_error_ttests(table)
        n_rows = len(table)
        n_skipped = 0
    else:
        corpus = _load_corpus(args)
        bench = pl.benchmark_snr(corpus, args.levels, args.seeds_per_level,
                                 base_seed=args.seed)
        table, ttests = bench.level_table, bench.ttests
        n_rows, n_skipped = bench.n_rows, bench.n_skipped
        (out / "snr_table.csv").write_text(pl.snr_table_to_csv(table),
                                           encoding="ascii")
        from .plots import plot_snr_benchmark
        plot_snr_benchmark(table, out / "snr_benchmark.png")

    blocks = []
    for method, report in ttests.items():
        blocks.append(f"least-squares |error| vs {method} |error|\n"
                      + format_ttest_report(report, "lsr_abs_error",
                                            f"{method}_abs_error"))
    text = "\n\n".join(blocks) + "\n" if blocks \
        else "t-tests skipped: need at least two noise levels\n"
    (out / "snr_ttests.txt").write_text(text, encoding="ascii")

    print(f"{len(table)} noise levels, {n_rows} samples, "
          f"{n_skipped} skipped (degenerate)")
    for method, report in ttests.items():
        print(f"lsr vs {method}: t = {report.t_stat:.5f}, "
              f"one-tail p = {report.p_one_tail:.6g}")
    if not ttests:
        print("t-tests skipped: need at least two noise levels")
    print(f"outputs in {out}")
    return 0


def _cmd_bench_filters(args) -> int:
    model_path = Path(args.model)
    if not model_path.exists():
        raise UsageError(f"--model: no such file {args.model!r}")
    model = pl.load_pipeline(model_path)
    corpus = _load_corpus(args)
    bench = pl.benchmark_filters(corpus, args.levels, args.seeds_per_level,
                                 model, base_seed=args.seed,
                                 window=args.window)
    out = _out_dir(args)
    (out / "filter_table.csv").write_text(
        pl.filter_table_to_csv(bench.level_table), encoding="ascii")
    (out / "filter_comparison.csv").write_text(
        pl.comparison_table_to_csv(bench.comparison_table), encoding="ascii")
    (out / "filter_records.csv").write_text(
        pl.records_to_csv(bench.records), encoding="ascii")
    if bench.ttest is not None:
        (out / "filter_ttest.txt").write_text(
            format_ttest_report(bench.ttest, "mse_post", "mse_pre") + "\n",
            encoding="ascii")
    from .plots import plot_filter_comparison, plot_filter_levels
    plot_filter_levels(bench.level_table, out / "filter_levels.png")
    plot_filter_comparison(bench.comparison_table, out / "filter_comparison.png")

    print(f"{len(bench.records)} runs over {len(bench.level_table)} levels, "
          f"{bench.n_failed} fallback cases")
    for row in bench.level_table:
        print(f"nv {row['nv']:g}: mse {row['mse_pre']:.6g} -> "
              f"{row['mse_post']:.6g}")
    if bench.ttest is not None:
        print(f"post vs pre: t = {bench.ttest.t_stat:.5f}, "
              f"one-tail p = {bench.ttest.p_one_tail:.6g}")
    print(f"outputs in {out}")
    return 0


def _read_column(path_text: str, column: str | None) -> list:
    path = Path(path_text)
    if not path.exists():
        raise UsageError(f"no such file {path_text!r}")
    import csv as csv_mod
    rows = list(csv_mod.reader(path.read_text(encoding="ascii").splitlines()))
    rows = [r for r in rows if r]
    if not rows:
        raise DataError(f"{path_text}: empty file")
    if column is not None:
        header = rows[0]
        if column not in header:
            raise DataError(f"{path_text}: no column {column!r} in {header}")
        idx = header.index(column)
        body = rows[1:]
    else:
        idx = 0
        if len(rows[0]) != 1:
            raise DataError(f"{path_text}: expected a single column "
                            "(use --x-col/--y-col for named columns)")
        try:
            float(rows[0][0])
            body = rows
        except ValueError:
            body = rows[1:]  # single column with header
    try:
        return [float(r[idx]) for r in body]
    except (ValueError, IndexError) as exc:
        raise DataError(f"{path_text}: bad numeric value: {exc}")


def _cmd_ttest(args) -> int:
    x = _read_column(args.x, args.x_col)
    y = _read_column(args.y, args.y_col)
    if len(x) != len(y):
        raise DataError(f"paired test needs equal lengths, "
                        f"got {len(x)} and {len(y)}")
    report = paired_t_test(x, y, alpha=args.alpha)
    label_x = args.x_col or Path(args.x).stem
    label_y = args.y_col or Path(args.y).stem
    text = format_ttest_report(report, label_x, label_y)
    print(text)
    out = _out_dir(args)
    (out / "ttest.txt").write_text(text + "\n", encoding="ascii")
    _write_json(out / "ttest.json", {
        "mean_x": report.mean_x, "mean_y": report.mean_y,
        "var_x": report.var_x, "var_y": report.var_y,
        "n": report.n, "pearson": report.pearson, "df": report.df,
        "t_stat": report.t_stat, "p_one_tail": report.p_one_tail,
        "p_two_tail": report.p_two_tail, "t_crit_one": report.t_crit_one,
        "t_crit_two": report.t_crit_two, "alpha": report.alpha,
    })
    return 0


_DISPATCH = {
    ("acf",): _cmd_acf,
    ("snr",): _cmd_snr,
    ("noise", "add"): _cmd_noise_add,
    ("filter",): _cmd_filter,
    ("dataset", "gen"): _cmd_dataset_gen,
    ("train",): _cmd_train,
    ("run",): _cmd_run,
    ("bench", "snr"): _cmd_bench_snr,
    ("bench", "filters"): _cmd_bench_filters,
    ("ttest",): _cmd_ttest,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return 0 if exc.code in (0, None) else 1
        key = (args.command,)
        for attr in ("noise_command", "dataset_command", "bench_command"):
            name = getattr(args, attr, None)
            if name:
                key = (args.command, name)
        return _DISPATCH[key](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
