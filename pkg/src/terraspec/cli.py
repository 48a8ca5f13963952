"""Command-line interface: one subcommand per analysis surface.

Subcommands: classify, spectrum-map, point-test, resolvent-verify,
product-band, ideal-qnorm, ideal-axioms.  Every command reads a single
JSON config (--config), writes a machine-readable report (--out), and
embeds the config digest and tool version in the output.  Identical
config + seed reproduces byte-identical files; TERRASPEC_SEED overrides
the config seed.

Exit codes: 0 pass/decisive, 1 usage or config error, 2 inconclusive,
3 assertion failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__, ideals, products, sequences, spectrum, terraced
from .errors import TerraspecError
from .numerics import TriState

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONCLUSIVE = 2
EXIT_FAILED = 3


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _json_ready(obj):
    """Recursively convert report objects to JSON-serializable values."""
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, TriState):
        return obj.value
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_json_ready(v) for v in obj.tolist()]
    return obj


def _write_json(path: str, payload: dict) -> None:
    text = json.dumps(_json_ready(payload), sort_keys=True, indent=2) + "\n"
    with open(path, "w") as fh:
        fh.write(text)


def _write_csv(path: str, header: list[str], rows, meta: str) -> None:
    lines = [meta, ",".join(header)]
    for row in rows:
        lines.append(",".join(row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


class ConfigError(Exception):
    pass


def _load_config(path: str) -> tuple[dict, str]:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    digest = hashlib.sha256(raw).hexdigest()
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg, digest


def _effective_seed(cfg: dict) -> int:
    env = os.environ.get("TERRASPEC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"TERRASPEC_SEED must be an integer, got {env!r}") from exc
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    return seed


def _sequence(cfg: dict, key: str, default=None) -> sequences.SequenceSpec:
    if key not in cfg:
        if default is not None:
            return default
        raise ConfigError(f"config needs sequence {key!r}")
    try:
        return sequences.from_json(cfg[key])
    except TerraspecError as exc:
        raise ConfigError(f"bad sequence {key!r}: {exc}") from exc


def _chi(cfg: dict, a: sequences.SequenceSpec) -> float:
    if "chi" in cfg:
        chi = float(cfg["chi"])
        if chi <= 0:
            raise ConfigError("chi must be positive")
        return chi
    try:
        return sequences.estimate_chi(a).chi
    except TerraspecError as exc:
        raise ConfigError(f"chi could not be estimated: {exc}") from exc


def _lambda(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"lambda must be a number or [re, im], got {value!r}")


def _n_max(cfg: dict, default: int = 10000) -> int:
    n = cfg.get("n_max", default)
    if not isinstance(n, int) or n < 1:
        raise ConfigError("n_max must be a positive integer")
    return n


def _meta(digest: str, seed: int) -> dict:
    return {"version": __version__, "config_digest": digest, "seed": seed}


def cmd_classify(cfg: dict, digest: str, out: str, jobs: int) -> int:
    a = _sequence(cfg, "a")
    r = _sequence(cfg, "r", sequences.constant(1.0))
    s = _sequence(cfg, "s", sequences.constant(1.0))
    report = terraced.classify_boundedness(a, r, s, _n_max(cfg))
    payload = _meta(digest, _effective_seed(cfg))
    payload["result"] = {
        "bounded": report.bounded,
        "compact": report.compact,
        "norm": report.norm,
        "sup_estimate": report.sup_estimate,
        "method": report.method,
        "truncated": report.truncated,
        "criterion_samples": [[n, c] for n, c in report.criterion_samples],
    }
    _write_json(out, payload)
    decisive = TriState.INCONCLUSIVE not in (report.bounded, report.compact)
    return EXIT_OK if decisive else EXIT_INCONCLUSIVE


def _grid_from_cfg(block: dict) -> spectrum.GridSpec:
    try:
        re_range = tuple(float(v) for v in block["re_range"])
        im_range = tuple(float(v) for v in block["im_range"])
        res = block["resolution"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad grid block: {exc}") from exc
    if isinstance(res, int):
        res = (res, res)
    else:
        res = (int(res[0]), int(res[1]))
    try:
        return spectrum.GridSpec(re_range, im_range, res)
    except TerraspecError as exc:
        raise ConfigError(str(exc)) from exc


def _classify_row(args):
    im, res, a, s, chi, n_max = args
    return [
        spectrum.classify_point(complex(re, im), a, s, chi, n_max=n_max) for re in res
    ]


def cmd_spectrum_map(cfg: dict, digest: str, out: str, jobs: int) -> int:
    a = _sequence(cfg, "a")
    s = _sequence(cfg, "s", sequences.constant(1.0))
    chi = _chi(cfg, a)
    block = cfg.get("spectrum_map", {})
    if "grid" not in block:
        raise ConfigError("spectrum-map needs spectrum_map.grid")
    grid = _grid_from_cfg(block["grid"])
    n_max = _n_max(cfg)
    if jobs > 1:
        tasks = [(im, grid.re_values(), a, s, chi, n_max) for im in grid.im_values()]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_classify_row, tasks))
        points = [pt for row in rows for pt in row]
    else:
        points = spectrum.spectrum_grid(a, s, chi, grid, n_max=n_max)
    if out.endswith(".json"):
        payload = _meta(digest, _effective_seed(cfg))
        payload["result"] = [
            {
                "lambda": pt.lam,
                "label": pt.label.value,
                "alpha": pt.evidence.alpha,
                "alpha_chi": pt.evidence.alpha_chi,
                "dist_to_S": pt.evidence.dist_to_S,
                "a1": pt.evidence.a1,
                "a2": pt.evidence.a2,
            }
            for pt in points
        ]
        _write_json(out, payload)
        return EXIT_OK
    header = ["re", "im", "label", "alpha", "alpha_chi", "dist_to_S", "a1", "a2"]
    rows = []
    for pt in points:
        ev = pt.evidence
        rows.append(
            [
                _fmt(pt.lam.real),
                _fmt(pt.lam.imag),
                pt.label.value,
                _fmt(ev.alpha) if ev.alpha is not None else "nan",
                _fmt(ev.alpha_chi) if ev.alpha_chi is not None else "nan",
                _fmt(ev.dist_to_S),
                ev.a1.value,
                ev.a2.value,
            ]
        )
    meta = f"# terraspec {__version__} config_digest={digest} seed={_effective_seed(cfg)}"
    _write_csv(out, header, rows, meta)
    return EXIT_OK


def cmd_point_test(cfg: dict, digest: str, out: str, jobs: int) -> int:
    a = _sequence(cfg, "a")
    s = _sequence(cfg, "s", sequences.constant(1.0))
    chi = _chi(cfg, a)
    block = cfg.get("point_test", {})
    lambdas = block.get("lambdas")
    if not lambdas:
        raise ConfigError("point-test needs point_test.lambdas")
    n_max = _n_max(cfg)
    results = []
    inconclusive = False
    for raw in lambdas:
        lam = _lambda(raw)
        point = spectrum.point_spectrum_test(lam, a, s, chi, n_max=n_max)
        adjoint = spectrum.adjoint_point_test(lam, a, s, chi, n_max=n_max)
        label = spectrum.classify_point(lam, a, s, chi, n_max=n_max)
        inconclusive |= TriState.INCONCLUSIVE in (point.outcome, adjoint.outcome)
        results.append(
            {
                "lambda": lam,
                "point": point.outcome,
                "point_detail": point.detail,
                "adjoint": adjoint.outcome,
                "adjoint_detail": adjoint.detail,
                "label": label.label.value,
            }
        )
    payload = _meta(digest, _effective_seed(cfg))
    payload["result"] = results
    _write_json(out, payload)
    return EXIT_INCONCLUSIVE if inconclusive else EXIT_OK


def cmd_resolvent_verify(cfg: dict, digest: str, out: str, jobs: int) -> int:
    a = _sequence(cfg, "a")
    block = cfg.get("resolvent_verify", {})
    if "lambda" not in block or "n" not in block:
        raise ConfigError("resolvent-verify needs resolvent_verify.lambda and .n")
    lam = _lambda(block["lambda"])
    n = int(block["n"])
    tol = float(block.get("tol", 1e-10))
    check = spectrum.verify_resolvent(lam, a, n, tol)
    payload = _meta(digest, _effective_seed(cfg))
    payload["result"] = {
        "lambda": lam,
        "n": n,
        "tol": tol,
        "left_residual": check.left_residual,
        "right_residual": check.right_residual,
        "max_residual": check.max_residual,
        "passed": check.passed,
    }
    _write_json(out, payload)
    return EXIT_OK if check.passed else EXIT_FAILED


def cmd_product_band(cfg: dict, digest: str, out: str, jobs: int, csv_out: str | None = None) -> int:
    a = _sequence(cfg, "a")
    chi = _chi(cfg, a)
    block = cfg.get("product_band", {})
    if "lambda" not in block:
        raise ConfigError("product-band needs product_band.lambda")
    lam = _lambda(block["lambda"])
    n_range = tuple(block.get("n_range", (128, 32768)))
    exponent = block.get("exponent")
    report = products.ratio_band(
        a, lam, chi, (int(n_range[0]), int(n_range[1])),
        exponent=None if exponent is None else float(exponent),
    )
    payload = _meta(digest, _effective_seed(cfg))
    payload["result"] = {
        "lambda": lam,
        "chi": chi,
        "exponent": report.exponent,
        "verdict": report.verdict,
        "log_log_slope": report.log_log_slope,
        "band": list(report.band),
        "ratios": [[n, v] for n, v in report.ratios],
    }
    _write_json(out, payload)
    if csv_out:
        meta = f"# terraspec {__version__} config_digest={digest} seed={_effective_seed(cfg)}"
        rows = [[str(n), _fmt(v)] for n, v in report.ratios]
        _write_csv(csv_out, ["n", "ratio"], rows, meta)
    if report.verdict == "bounded_band":
        return EXIT_OK
    if report.verdict == "degenerate":
        return EXIT_INCONCLUSIVE
    return EXIT_FAILED


def cmd_ideal_qnorm(cfg: dict, digest: str, out: str, jobs: int) -> int:
    a = _sequence(cfg, "a")
    r = _sequence(cfg, "r", sequences.constant(1.0))
    block = cfg.get("ideal_qnorm", {})
    if "snumbers" in block:
        snum = ideals.SNumberSequence(tuple(float(v) for v in block["snumbers"]), "user")
    elif "section_n" in block:
        sec = terraced.build_section(a, int(block["section_n"]))
        s_w = _sequence(cfg, "s", sequences.constant(1.0))
        snum = ideals.snumbers_from_section(sec, r, s_w)
    else:
        raise ConfigError("ideal-qnorm needs ideal_qnorm.snumbers or .section_n")
    result = ideals.quasi_norm(snum, a, r)
    flags = ideals.ideal_preconditions(a, r)
    membership = ideals.stype_membership(snum, a, r)
    payload = _meta(digest, _effective_seed(cfg))
    payload["result"] = {
        "value": result.value,
        "argmax_index": result.argmax_index,
        "truncation_N": result.truncation_N,
        "tail_status": result.tail_status,
        "stype_member": membership,
        "ideal_ok": flags.ideal_ok,
        "closed_ok": flags.closed_ok,
        "qnorm_normalized": flags.qnorm_normalized,
    }
    _write_json(out, payload)
    return EXIT_INCONCLUSIVE if membership is TriState.INCONCLUSIVE else EXIT_OK


def cmd_ideal_axioms(cfg: dict, digest: str, out: str, jobs: int) -> int:
    a = _sequence(cfg, "a")
    r = _sequence(cfg, "r", sequences.constant(1.0))
    block = cfg.get("ideal_axioms", {})
    trials = int(block.get("trials", 200))
    dim = int(block.get("dim", 8))
    seed = _effective_seed(cfg)
    report = ideals.check_quasinorm_axioms(trials, dim, a, r, seed=seed)
    payload = _meta(digest, seed)
    payload["result"] = {
        "trials": report.trials,
        "dim": report.dim,
        "normalized": report.normalized,
        "violations": report.violations,
        "total_violations": report.total_violations,
    }
    _write_json(out, payload)
    return EXIT_OK if report.total_violations == 0 else EXIT_FAILED


_COMMANDS = {
    "classify": cmd_classify,
    "spectrum-map": cmd_spectrum_map,
    "point-test": cmd_point_test,
    "resolvent-verify": cmd_resolvent_verify,
    "product-band": cmd_product_band,
    "ideal-qnorm": cmd_ideal_qnorm,
    "ideal-axioms": cmd_ideal_axioms,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="terraspec",
        description="Spectral numerics for terraced operators on weighted c0 spaces.",
    )
    parser.add_argument("--version", action="version", version=f"terraspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", required=True, help="output report path")
        p.add_argument("--jobs", type=int, default=1, help="worker pool size for grids")
        if name == "product-band":
            p.add_argument("--csv", default=None, help="also write (n, ratio) pairs as CSV")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, digest = _load_config(args.config)
        if args.command == "product-band":
            return cmd_product_band(cfg, digest, args.out, args.jobs, args.csv)
        return _COMMANDS[args.command](cfg, digest, args.out, args.jobs)
    except (ConfigError, TerraspecError) as exc:
        print(f"terraspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
