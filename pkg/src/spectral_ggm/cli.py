"""
Command-line interface: ``spectral-ggm {sample,degrade,estimate,denoise,sweep,validate}``.

Settings resolve as CLI flags > ``--config`` JSON > built-in defaults. Every
output carries provenance (tool version, resolved config, RNG, input
digests), either embedded (JSON reports) or in a ``<output>.json`` sidecar.
Passing a sidecar or report back as ``--config`` repeats the run exactly.

Exit codes: 0 success, 1 validation failure, 2 usage/config error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import warnings

import numpy as np

from . import __version__, estimator, imageio, restoration, spectral, synthesis
from . import sweep as sweep_mod
from . import validation
from .errors import (DegenerateData, InvalidConfig, NonPositiveInput, NonSquareImage,
                     NotConverged)
from .model import Hyperparams

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

DEFAULTS = {
    "sample": {"N": 64, "alpha": 1.0, "gamma": 1e-3, "seed": 0, "offset": 32768.0,
               "output": None},
    "degrade": {"input": None, "output": None, "sigma": 40.0, "seed": 0},
    "estimate": {"input": None, "output": None, "n": None, "shrink": 0.0},
    "denoise": {"input": None, "output": None, "alpha": None, "beta": None, "gamma": None,
                "estimate_n": None},
    "sweep": {"input": None, "output": None, "sigma": 40.0,
              "fractions": list(sweep_mod.DEFAULT_FRACTIONS), "svg": None, "timing": False},
    "validate": {"suites": None},
}

OBJECTIVE_NOTE = ("objective is the log marginal likelihood per retained mode of W(n); "
                  "values from different n are not comparable")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _fractions(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad fraction list {text!r}") from exc


def build_parser():
    S = argparse.SUPPRESS
    p = _Parser(prog="spectral-ggm", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, name):
        d = DEFAULTS[name]
        sp.add_argument("--config", default=None, help="JSON config, sidecar or report")
        if "input" in d:
            sp.add_argument("--input", default=S, help="input image (.pgm, .png, .npy)")
        if "output" in d:
            sp.add_argument("--output", default=S, help="output path")
        return d

    sp = sub.add_parser("sample", help="draw a field from the prior")
    d = common(sp, "sample")
    sp.add_argument("--N", type=int, default=S, help=f"lattice side (default {d['N']})")
    sp.add_argument("--alpha", type=float, default=S, help=f"default {d['alpha']}")
    sp.add_argument("--gamma", type=float, default=S, help=f"default {d['gamma']}")
    sp.add_argument("--seed", type=int, default=S, help=f"default {d['seed']}")
    sp.add_argument("--offset", type=float, default=S,
                    help=f"added before 16-bit quantization (default {d['offset']})")

    sp = sub.add_parser("degrade", help="add white Gaussian noise")
    d = common(sp, "degrade")
    sp.add_argument("--sigma", type=float, default=S, help=f"noise std (default {d['sigma']})")
    sp.add_argument("--seed", type=int, default=S, help=f"default {d['seed']}")

    sp = sub.add_parser("estimate", help="maximize the renormalized marginal likelihood")
    d = common(sp, "estimate")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--n", type=int, default=S, help="window side n (overrides --shrink)")
    g.add_argument("--shrink", type=float, default=S,
                   help=f"1 - n/N (default {d['shrink']})")

    sp = sub.add_parser("denoise", help="posterior-mean restoration")
    d = common(sp, "denoise")
    for name in ("alpha", "beta", "gamma"):
        sp.add_argument(f"--{name}", type=float, default=S)
    sp.add_argument("--estimate-n", dest="estimate_n", type=int, default=S,
                    help="estimate hyperparameters on W(n) first")

    sp = sub.add_parser("sweep", help="risk and SNR against window shrink")
    d = common(sp, "sweep")
    sp.add_argument("--sigma", type=float, default=S, help=f"noise std (default {d['sigma']})")
    sp.add_argument("--shrink", dest="fractions", type=_fractions, default=S,
                    help="comma-separated shrink fractions (default 0,0.05,...,0.95)")
    sp.add_argument("--svg", default=S, help="optional SVG chart path")
    sp.add_argument("--timing", action="store_true", default=S,
                    help="record estimation wall time (makes the CSV non-reproducible)")

    sp = sub.add_parser("validate", help="run the built-in oracle suites")
    common(sp, "validate")
    sp.add_argument("--suite", dest="suites", action="append", default=S,
                    choices=sorted(validation.SUITES))
    return p


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidConfig(f"{path}: config must be a JSON object")
    # sidecars and reports keep the resolved settings under "config"
    if isinstance(data.get("config"), dict):
        data = data["config"]
    return data


def resolve(command, args):
    cfg = dict(DEFAULTS[command])
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    if args.config:
        file_cfg = load_config(args.config)
        unknown = set(file_cfg) - set(cfg)
        if unknown:
            raise InvalidConfig(f"unknown config keys for {command}: {sorted(unknown)}")
        cfg.update(file_cfg)
    cfg.update(flags)
    return cfg


def _require(cfg, *keys):
    for k in keys:
        if cfg.get(k) is None:
            raise InvalidConfig(f"missing required setting {k!r}")


def _check_output_dir(path):
    d = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(d):
        raise FileNotFoundError(f"output directory does not exist: {d}")


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def provenance(command, cfg, inputs=(), rng=None):
    meta = {
        "tool": "spectral-ggm",
        "version": __version__,
        "command": command,
        "config": cfg,
        "inputs": {p: imageio.file_digest(p) for p in inputs},
    }
    if rng is not None:
        meta["rng"] = {"algorithm": rng.algorithm, "seed": rng.seed}
    return meta


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _write_sidecar(path, meta):
    _write_text(path + ".json", _dump(meta))


def _positive(cfg, *keys):
    for k in keys:
        v = cfg.get(k)
        if v is not None and not (isinstance(v, (int, float)) and v > 0):
            raise InvalidConfig(f"{k} must be > 0, got {v!r}")


def cmd_sample(cfg, out):
    _require(cfg, "output")
    N = cfg["N"]
    if not isinstance(N, int) or N < 1:
        raise InvalidConfig(f"N must be a positive integer, got {N!r}")
    _positive(cfg, "alpha", "gamma")
    _check_output_dir(cfg["output"])
    rng = synthesis.SeededRng(cfg["seed"])
    # beta does not enter the prior
    f = synthesis.sample_prior(Hyperparams(cfg["alpha"], 1.0, cfg["gamma"]), N, rng)
    path = cfg["output"]
    if path.lower().endswith(".pgm"):
        imageio.write_pgm(path, f + cfg["offset"], 65535)
    else:
        imageio.write_image(path, f + cfg["offset"], 65535)
    meta = provenance("sample", cfg, rng=rng)
    meta["quantization"] = "stored = clip(round(field + offset), 0, 65535)"
    _write_sidecar(path, meta)
    print(f"wrote {path}", file=out)
    return EXIT_OK


def _output_maxval(img):
    return 255 if (img.maxval or 65535) <= 255 else 65535


def cmd_degrade(cfg, out):
    _require(cfg, "input", "output")
    _positive(cfg, "sigma")
    _check_output_dir(cfg["output"])
    img = imageio.read_image(cfg["input"])
    noise = synthesis.NoiseSpec(cfg["sigma"])
    rng = synthesis.SeededRng(cfg["seed"])
    gen = rng.generator()
    g = img.data + noise.sigma * gen.standard_normal(img.data.shape)
    imageio.write_image(cfg["output"], g, _output_maxval(img))
    meta = provenance("degrade", cfg, [cfg["input"]], rng)
    meta["noise"] = {"sigma": noise.sigma, "beta_star": noise.beta_star}
    _write_sidecar(cfg["output"], meta)
    print(f"wrote {cfg['output']}", file=out)
    return EXIT_OK


def _window_for(cfg, N):
    if cfg.get("n") is not None:
        n = cfg["n"]
        if not isinstance(n, int) or not 1 <= n <= N:
            raise InvalidConfig(f"n must be an integer in [1, {N}], got {n!r}")
        return n
    try:
        return sweep_mod.window_side(N, cfg["shrink"])
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(str(exc)) from exc


def _estimate_channel(field, n):
    N = field.shape[0]
    G = spectral.select_window(spectral.forward_dft(field), n)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = estimator.estimate_empirical(G, n, N)
    notes = [str(w.message) for w in caught
             if issubclass(w.category, (NotConverged, DegenerateData))]
    return res, notes


def cmd_estimate(cfg, out):
    _require(cfg, "input")
    if cfg.get("output"):
        _check_output_dir(cfg["output"])
    img = imageio.read_image(cfg["input"])
    N = img.size
    n = _window_for(cfg, N)
    channels = []
    for name, field in img.channels:
        res, notes = _estimate_channel(field, n)
        entry = {"channel": name, **res.estimate.as_dict(), "objective": res.objective_value,
                 "iterations": res.iterations, "converged": res.converged, "n": n, "N": N}
        if notes:
            entry["warnings"] = notes
        channels.append(entry)
    report = provenance("estimate", cfg, [cfg["input"]])
    report.update({"channels": channels, "objective_note": OBJECTIVE_NOTE})
    text = _dump(report)
    if cfg.get("output"):
        _write_text(cfg["output"], text)
    out.write(text)
    return EXIT_OK


def cmd_denoise(cfg, out):
    _require(cfg, "input", "output")
    explicit = [cfg.get(k) for k in ("alpha", "beta", "gamma")]
    if cfg.get("estimate_n") is None and any(v is None for v in explicit):
        raise InvalidConfig("give --alpha, --beta and --gamma, or --estimate-n")
    _positive(cfg, "alpha", "beta", "gamma")
    _check_output_dir(cfg["output"])
    img = imageio.read_image(cfg["input"])
    N = img.size
    restored, per_channel = [], []
    for name, field in img.channels:
        entry = {"channel": name}
        if cfg.get("estimate_n") is not None:
            n = _window_for({"n": cfg["estimate_n"]}, N)
            res, notes = _estimate_channel(field, n)
            h = res.estimate
            entry.update({"estimated_on_n": n, "converged": res.converged})
            if notes:
                entry["warnings"] = notes
        else:
            h = Hyperparams(*explicit)
        rout = restoration.posterior_mean(field, h)
        restored.append(rout.restored)
        entry.update({"hyperparams": h.as_dict(), "gain": rout.spectral_gain_summary})
        per_channel.append(entry)
    data = restored[0] if len(restored) == 1 else np.stack(restored, axis=-1)
    imageio.write_image(cfg["output"], data, _output_maxval(img))
    meta = provenance("denoise", cfg, [cfg["input"]])
    meta["report"] = {"channels": per_channel, "clamped_at_export": True}
    _write_sidecar(cfg["output"], meta)
    print(f"wrote {cfg['output']}", file=out)
    return EXIT_OK


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def sweep_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(sweep_mod.CSV_HEADER)
    for r in records:
        w.writerow([_fmt(v) for v in r.row()])
    return buf.getvalue()


def sweep_svg(records, width=640, height=400):
    """Minimal line chart of snr_db against shrink, one polyline per channel."""
    colors = {"gray": "#333333", "R": "#d62728", "G": "#2ca02c", "B": "#1f77b4"}
    xs = [r.shrink for r in records]
    ys = [r.snr_db for r in records]
    x0, x1 = 0.0, max(1.0, max(xs))
    y0, y1 = min(ys), max(ys)
    if y1 - y0 < 1e-9:
        y0, y1 = y0 - 1.0, y1 + 1.0
    pad = 50

    def px(x, y):
        return (pad + (x - x0) / (x1 - x0) * (width - 2 * pad),
                height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle">1 - n/N</text>',
        f'<text x="15" y="{height / 2}" transform="rotate(-90 15 {height / 2})" '
        f'text-anchor="middle">SNR [dB]</text>',
        f'<text x="{pad - 5}" y="{pad}" text-anchor="end" font-size="10">{y1:.2f}</text>',
        f'<text x="{pad - 5}" y="{height - pad}" text-anchor="end" font-size="10">{y0:.2f}</text>',
    ]
    for ch in dict.fromkeys(r.channel for r in records):
        rows = sorted((r for r in records if r.channel == ch), key=lambda r: r.shrink)
        pts = " ".join("%.2f,%.2f" % px(r.shrink, r.snr_db) for r in rows)
        color = colors.get(ch, "#000000")
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        for r in rows:
            cx, cy = px(r.shrink, r.snr_db)
            parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3" fill="{color}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_sweep(cfg, out):
    _require(cfg, "input", "output")
    _positive(cfg, "sigma")
    fractions = cfg["fractions"]
    if not fractions or any(not (isinstance(f, (int, float)) and 0 <= f < 1) for f in fractions):
        raise InvalidConfig(f"shrink fractions must lie in [0, 1), got {fractions!r}")
    _check_output_dir(cfg["output"])
    if cfg.get("svg"):
        _check_output_dir(cfg["svg"])
    img = imageio.read_image(cfg["input"])
    order = {name: i for i, (name, _) in enumerate(img.channels)}
    records = []
    for name, field in img.channels:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NotConverged)
            records.extend(sweep_mod.run_sweep(field, cfg["sigma"], fractions, channel=name))
    if not cfg.get("timing"):
        records = [dataclasses.replace(r, wall_time_ms=float("nan")) for r in records]
    records.sort(key=lambda r: (order[r.channel], r.n))
    _write_text(cfg["output"], sweep_csv(records))
    if cfg.get("svg"):
        _write_text(cfg["svg"], sweep_svg(records))
    meta = provenance("sweep", cfg, [cfg["input"]])
    meta["not_converged"] = [[r.channel, r.n] for r in records if not r.converged]
    _write_sidecar(cfg["output"], meta)
    print(f"wrote {cfg['output']}", file=out)
    return EXIT_OK


def cmd_validate(cfg, out):
    checks, seconds = validation.run_all(cfg.get("suites"))
    width = max(len(c.name) for c in checks)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status}  {c.suite:<13} {c.name:<{width}}  {c.detail}", file=out)
    ok = all(c.passed for c in checks)
    print(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed in {seconds:.1f} s",
          file=out)
    return EXIT_OK if ok else EXIT_VALIDATION


COMMANDS = {
    "sample": cmd_sample,
    "degrade": cmd_degrade,
    "estimate": cmd_estimate,
    "denoise": cmd_denoise,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args.command, args)
        return COMMANDS[args.command](cfg, out)
    except (InvalidConfig, NonSquareImage, NonPositiveInput) as exc:
        print(f"spectral-ggm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"spectral-ggm {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
