"""Command-line entry point: ``switchtrack {project,bounds,simulate,equivalence}``.

Exit codes: 0 success, 1 property breach, 2 validation error, 3 numeric
failure in a learner step.
"""
import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from . import bounds as B
from . import harness as Hn
from .learners import NumericalError
from .projection import project

log = logging.getLogger("switchtrack")

EXIT_OK, EXIT_BREACH, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3
EQUIVALENCE_TOL = 1e-9


class UsageError(ValueError):
    pass


def _fail(message):
    json.dump({"error": message}, sys.stderr)
    sys.stderr.write("\n")
    return EXIT_INVALID


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline="")


# -- project ------------------------------------------------------------------

def cmd_project(input_path, output_path=None):
    try:
        with open(input_path) as fh:
            data = json.load(fh)
        if not isinstance(data, dict) or "w" not in data or "beta" not in data:
            raise UsageError("input must be a JSON object with fields w and beta")
        result = project(data["w"], data["beta"])
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        return _fail(str(exc))
    fh = _open_out(output_path)
    try:
        Hn.dump_json(result.to_dict(), fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


# -- bounds -------------------------------------------------------------------

def _svg(rows, path, width=640, height=360, pad=40):
    cols = B.COLUMNS[1:]
    xs = [r["m"] for r in rows]
    ys = [r[c] for r in rows for c in cols]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    sx = (width - 2 * pad) / ((x1 - x0) or 1)
    sy = (height - 2 * pad) / ((y1 - y0) or 1)
    colors = ["#59306f", "#e6c300", "#3d7702", "#001c7f", "#cc001a"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>']
    for i, (col, color) in enumerate(zip(cols, colors)):
        pts = " ".join(f"{pad + (r['m'] - x0) * sx:.2f},{height - pad - (r[col] - y0) * sy:.2f}"
                       for r in rows)
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        parts.append(f'<text x="{pad + 5}" y="{pad + 14 * i}" font-size="11" fill="{color}">{col}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


def cmd_bounds(n, k, T, c, m_min, m_max, out_csv=None, out_svg=None):
    try:
        if m_min > m_max:
            raise UsageError("m_min exceeds m_max")
        rows = B.figure1_table(n, k, T, c, range(m_min, m_max + 1))
    except ValueError as exc:
        return _fail(str(exc))
    fh = _open_out(out_csv)
    try:
        wr = csv.writer(fh)
        wr.writerow(B.COLUMNS)
        for r in rows:
            wr.writerow([r["m"]] + [f"{r[col]:.6g}" for col in B.COLUMNS[1:]])
    finally:
        if fh is not sys.stdout:
            fh.close()
    if out_svg:
        _svg(rows, out_svg)
    return EXIT_OK


# -- simulate -----------------------------------------------------------------

_CONFIG_KEYS = {"learner", "n", "T", "k", "m", "alpha", "theta", "tuning", "loss_model",
                "noise", "seed", "seeds", "scheme", "exponent", "losses_csv"}


def _load_config(path):
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for key in ("learner", "n", "T", "k", "m"):
        if key not in cfg:
            raise UsageError(f"config is missing {key!r}")
    return cfg


def _learner_spec(cfg):
    kind = cfg["learner"]
    n, T, k, m = cfg["n"], cfg["T"], cfg["k"], cfg["m"]
    tuning = cfg.get("tuning", "optimal")
    extra = {"scheme": cfg.get("scheme", "geometric"),
             "exponent": float(cfg.get("exponent", 1.0))}
    if tuning == "optimal":
        alpha, theta = B.optimal_tuning(B.BoundInputs(n=n, T=T, k=k, m=m))
    elif tuning == "manual":
        alpha, theta = float(cfg.get("alpha", 0.0)), float(cfg.get("theta", 0.0))
    else:
        raise UsageError("tuning must be 'optimal' or 'manual'")
    if "alpha" in cfg and tuning == "optimal":
        alpha = float(cfg["alpha"])
    if "theta" in cfg and tuning == "optimal":
        theta = float(cfg["theta"])
    return Hn.LearnerSpec(kind, alpha=alpha, theta=theta, **extra)


def simulate_once(cfg, seed):
    """Run one configured experiment; returns the ExperimentResult."""
    n, T, k, m = cfg["n"], cfg["T"], cfg["k"], cfg["m"]
    model = Hn.LossModel(cfg.get("loss_model", "mix_loss"))
    spec = _learner_spec(cfg)
    comparator = Hn.generate_comparator(n, T, k, m, seed)
    if "losses_csv" in cfg:
        if model.kind != "mix_loss":
            raise UsageError("file-supplied losses require loss_model 'mix_loss'")
        stream = Hn.LossStream(Hn.read_loss_csv(cfg["losses_csv"]))
    else:
        stream = Hn.generate_losses(comparator, n, model, float(cfg.get("noise", 0.0)), seed)
    result = Hn.run_experiment(spec, stream, comparator, model)
    result.params.update({"seed": seed, "rng": Hn.RNG_ALGORITHM,
                          "noise": float(cfg.get("noise", 0.0))})
    return result


def cmd_simulate(config_path, out_dir=None, seed=None, full=False):
    try:
        cfg = _load_config(config_path)
        if cfg.get("seeds"):
            seeds = list(cfg["seeds"])
        else:
            seeds = [cfg.get("seed", 0) if seed is None else seed]
        results = [(s, simulate_once(cfg, s)) for s in seeds]
    except NumericalError as exc:
        log.error("numeric failure: %s", exc)
        json.dump({"error": f"numeric failure: {exc}"}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_NUMERIC
    except (OSError, json.JSONDecodeError, ValueError, TypeError, KeyError) as exc:
        return _fail(str(exc))
    out = Path(out_dir) if out_dir else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    for s, res in results:
        suffix = "" if len(results) == 1 else f"_seed{s}"
        if out is not None:
            Hn.write_result_csv(out / f"result{suffix}.csv", res)
            with open(out / f"summary{suffix}.json", "w") as fh:
                Hn.dump_json(res.summary(full=full), fh)
        ok = res.regret <= res.bound
        print(f"regret={res.regret:.6g} bound={res.bound:.6g} ok={str(ok).lower()}")
    return EXIT_OK


# -- equivalence --------------------------------------------------------------

def cmd_equivalence(seed, T, n, out_path=None, alpha=None, theta=None):
    try:
        if T < 1 or n < 2:
            raise UsageError("need T >= 1 and n >= 2")
        report = Hn.equivalence_deviations(seed, T, n, alpha, theta)
    except ValueError as exc:
        return _fail(str(exc))
    worst = max(report["deviations"].values())
    report["tolerance"] = EQUIVALENCE_TOL
    report["ok"] = worst < EQUIVALENCE_TOL
    fh = _open_out(out_path)
    try:
        Hn.dump_json(report, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK if report["ok"] else EXIT_BREACH


# -- argument parsing ---------------------------------------------------------

def _global_flags(suppress):
    # subcommands repeat the global flags; SUPPRESS keeps them from
    # overwriting values given before the subcommand name
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, **(kw or {"default": None}))
    p.add_argument("--out", help="output file or directory", **(kw or {"default": None}))
    p.add_argument("--full", action="store_true", help="include per-trial records",
                   **(kw or {"default": False}))
    return p


def build_parser():
    common = _global_flags(suppress=True)
    ap = argparse.ArgumentParser(prog="switchtrack", parents=[_global_flags(suppress=False)])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", parents=[common], help="project w onto C(beta)")
    p.add_argument("input", help="JSON file with fields w and beta")

    p = sub.add_parser("bounds", parents=[common], help="regret-bound table")
    p.add_argument("--n", type=int, default=500000)
    p.add_argument("--k", type=int, default=40)
    p.add_argument("--T", type=int, default=4000)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--m-min", type=int, default=2)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--svg", default=None)

    p = sub.add_parser("simulate", parents=[common], help="run a configured experiment")
    p.add_argument("config")

    p = sub.add_parser("equivalence", parents=[common],
                       help="Share-theta vs geometric MPP and Markov-prior specialists")
    p.add_argument("--T", type=int, default=200)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    return ap


def main(argv=None):
    logging.basicConfig(level=os.environ.get("SWITCHTRACK_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    if args.command == "project":
        return cmd_project(args.input, args.out)
    if args.command == "bounds":
        m_max = args.m_max if args.m_max is not None else args.k + 1
        return cmd_bounds(args.n, args.k, args.T, args.c, args.m_min, m_max,
                          args.out, args.svg)
    if args.command == "simulate":
        return cmd_simulate(args.config, args.out, args.seed, args.full)
    return cmd_equivalence(args.seed if args.seed is not None else 1, args.T, args.n,
                           args.out, args.alpha, args.theta)


if __name__ == "__main__":
    sys.exit(main())
