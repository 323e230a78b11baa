"""Command-line front end.

Exit codes: 0 success/pass, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .core import CsitProfile, RelabelRequired, ValidationError, validate
from .dof_formula import (classify_case, dof_user1_given_user2_max,
                          dof_user2_given_user1_max)
from .mac_region import MacInstance, mac_region_contains, oracle_agreement
from .rate_engine import (FLOOR_EXPONENT_TOL, SLOPE_TOL, estimate_dof_slopes,
                          interference_floor_probe)
from .scheme_builder import beta_bars, build_scheme

DEFAULT_P_GRID = "1e6,1e8,1e10"
DEFAULT_TRIALS = 50
ORACLE_TOL = 0.05

FIG4_FIXED = {"m2": 4, "n1": 1, "n2": 3}
FIG6_FIXED = {"m1": 1, "n1": 2, "n2": 3}


def parse_number(text: str) -> float:
    text = str(text).strip()
    try:
        return float(text)
    except ValueError:
        return float(Fraction(text))


def parse_list(text: str) -> list[float]:
    return [parse_number(t) for t in str(text).split(",") if t.strip()]


def parse_beta_grid(text: str) -> list[float]:
    """``start:step:stop`` (inclusive) or a comma list; fractions allowed."""
    text = str(text).strip()
    if ":" in text:
        start, step, stop = (Fraction(t.strip()) for t in text.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        out, k = [], 0
        while start + k * step <= stop:
            out.append(float(start + k * step))
            k += 1
        return out
    return parse_list(text)


def fmt6(x: float) -> str:
    return f"{x:.6g}"


def read_config_file(path: str) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


# Built-in defaults and converters for every mergeable option.
OPTIONS = {
    "m1": (None, int), "m2": (None, int), "n1": (None, int), "n2": (None, int),
    "beta12": (0.0, parse_number), "beta21": (0.0, parse_number),
    "beta_grid": ("0:1/100:1", parse_beta_grid),
    "p_grid": (DEFAULT_P_GRID, parse_list),
    "trials": (DEFAULT_TRIALS, int),
    "seed": (None, int),
    "out": (None, str),
    "format": ("json", str),
    "oracle": (False, lambda v: str(v).lower() in ("1", "true", "yes", "on")),
    "workers": (1, int),
    "K": (None, int), "M": (None, int),
    "d": (None, parse_list), "alpha": (None, parse_list),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="doflab", description="2-user MIMO IC partial-CSIT DoF lab")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, antennas=True):
        p.add_argument("--config", help="key=value file of defaults; flags win")
        p.add_argument("--out", help="output path (file, or directory for figures)")
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--seed", type=int, help="master seed (default: $DOF_LAB_SEED or 0)")
        if antennas:
            for name in ("m1", "m2", "n1", "n2"):
                p.add_argument(f"--{name}", type=int)
            p.add_argument("--beta12", type=parse_number)
            p.add_argument("--beta21", type=parse_number)

    p = sub.add_parser("dof", help="evaluate both corner points")
    common(p)
    p = sub.add_parser("figures", help="write fig4.csv and fig6.csv")
    common(p, antennas=False)
    p.add_argument("--beta-grid", dest="beta_grid", type=str)
    p = sub.add_parser("simulate", help="finite-SNR slope verification")
    common(p)
    p.add_argument("--p-grid", dest="p_grid", type=str)
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int)
    p = sub.add_parser("mac-check", help="elevated-floor MAC region membership")
    common(p, antennas=False)
    p.add_argument("--K", type=int)
    p.add_argument("--M", type=int)
    p.add_argument("--d", type=str, help="comma list of DoF loads")
    p.add_argument("--alpha", type=str, help="comma list of noise-floor exponents")
    p.add_argument("--oracle", action="store_true", default=None)
    p.add_argument("--p-grid", dest="p_grid", type=str)
    p.add_argument("--trials", type=int)
    return parser


def merge_options(parser: argparse.ArgumentParser, args: argparse.Namespace) -> dict:
    """flags > config file > built-in defaults."""
    file_values = {}
    if getattr(args, "config", None):
        try:
            file_values = read_config_file(args.config)
        except (OSError, ValueError) as exc:
            parser.error(str(exc))
    merged = {"command": args.command}
    for key, (default, convert) in OPTIONS.items():
        flag = getattr(args, key, None)
        try:
            if flag is not None:
                merged[key] = convert(flag) if isinstance(flag, str) and key not in ("out", "format") else flag
            elif key in file_values:
                merged[key] = convert(file_values[key])
            else:
                merged[key] = convert(default) if isinstance(default, str) else default
        except (ValueError, ZeroDivisionError) as exc:
            parser.error(f"bad value for {key}: {exc}")
    if merged["seed"] is None:
        merged["seed"] = int(os.environ.get("DOF_LAB_SEED", "0"))
    if merged["format"] not in ("json", "csv"):
        parser.error("format must be json or csv")
    return merged


def _require(parser, opts, *names):
    missing = [f"--{n}" for n in names if opts.get(n) is None]
    if missing:
        parser.error("the following arguments are required: " + ", ".join(missing))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config_and_csit(parser, opts):
    _require(parser, opts, "m1", "m2", "n1", "n2")
    try:
        return validate((opts["m1"], opts["m2"], opts["n1"], opts["n2"]),
                        CsitProfile(opts["beta12"], opts["beta21"]))
    except ValidationError as exc:
        parser.error(str(exc))


def cmd_dof(parser, opts) -> int:
    cfg, csit = _config_and_csit(parser, opts)
    corner1 = dof_user2_given_user1_max(cfg, csit)
    corner2 = dof_user1_given_user2_max(cfg, csit)
    report = {
        "config": dict(zip(("m1", "m2", "n1", "n2"), cfg.as_tuple())),
        "csit": {"beta12": csit.beta12, "beta21": csit.beta21},
        "d1_max": min(cfg.m1, cfg.n1),
        "d2": corner1.d2,
        "user1_max": corner1.to_dict(),
        "d2_max": min(cfg.m2, cfg.n2),
        "d1": corner2.d2,
        "user2_max": corner2.to_dict(),
    }
    try:
        case = classify_case(cfg)
        report["case"] = case.value
        report["beta_bar"] = beta_bars(case, cfg, csit).to_dict()
    except RelabelRequired:
        report["case"] = "formula-as-stated"
        report["beta_bar"] = None
    _emit(json.dumps(report, indent=2) + "\n", opts["out"])
    return 0


def figure_rows(beta_grid):
    fig4, fig6 = [], []
    for b in beta_grid:
        csit = CsitProfile(beta12=b)
        fig4.append([b] + [dof_user2_given_user1_max((m1, 4, 1, 3), csit).d2 for m1 in (1, 2, 3)])
        fig6.append([b] + [dof_user2_given_user1_max((1, m2, 2, 3), csit).d2 for m2 in (3, 4)])
    return fig4, fig6


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt6(v) for v in row])


def cmd_figures(parser, opts) -> int:
    grid = opts["beta_grid"]
    if any(not 0 <= b <= 1 for b in grid):
        parser.error("beta grid values must lie in [0, 1]")
    fig4, fig6 = figure_rows(grid)
    outdir = Path(opts["out"] or ".")
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        _write_csv(outdir / "fig4.csv", ["beta12", "d2_M1eq1", "d2_M1eq2", "d2_M1eq3"], fig4)
        _write_csv(outdir / "fig6.csv", ["beta12", "d2_M2eq3", "d2_M2eq4"], fig6)
    except OSError as exc:
        print(f"error: cannot write figures: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {outdir / 'fig4.csv'} and {outdir / 'fig6.csv'}", file=sys.stderr)
    return 0


def cmd_simulate(parser, opts) -> int:
    cfg, csit = _config_and_csit(parser, opts)
    if opts["trials"] < 10:
        parser.error("--trials must be at least 10")
    if opts["workers"] < 1:
        parser.error("--workers must be at least 1")
    try:
        scheme = build_scheme(cfg, csit)
        report = estimate_dof_slopes(cfg, csit, opts["p_grid"], opts["trials"], opts["seed"],
                                     workers=opts["workers"], scheme=scheme)
    except (RelabelRequired, ValueError) as exc:
        parser.error(str(exc))
    floors = []
    if any(s.msg_class == "private" for s in scheme.streams):
        floors = interference_floor_probe(scheme, opts["p_grid"], opts["trials"], opts["seed"])
    if opts["format"] == "csv":
        text = report.to_csv()
    else:
        data = report.to_dict()
        data["floors"] = [f.to_dict() for f in floors]
        text = json.dumps(data, indent=2) + "\n"
    _emit(text, opts["out"])

    ok = report.passed(SLOPE_TOL)
    err = sys.stderr
    for k, (s, d) in enumerate(zip(report.slope, report.predicted), 1):
        print(f"user {k}: slope {s:.4f} predicted {d:.4f} "
              f"{'ok' if abs(s - d) <= SLOPE_TOL else 'MISMATCH'}", file=err)
    for f in floors:
        flat = f.exponent <= FLOOR_EXPONENT_TOL
        ok &= flat
        print(f"floor {f.key}: exponent {f.exponent:.4f} {'flat' if flat else 'RISING'}", file=err)
    for flag in report.flags:
        print(f"flag: {flag}", file=err)
        if flag == "scheme-infeasible":
            for m in report.stage_margins:
                print(f"  rx{m['receiver']} stage {m['stage']}: min margin {m['min_margin']:.4f}", file=err)
    print("PASS" if ok else "FAIL", file=err)
    return 0 if ok else 1


def cmd_mac_check(parser, opts) -> int:
    d, alpha = opts["d"], opts["alpha"]
    if d is None or alpha is None:
        parser.error("the following arguments are required: --d, --alpha")
    K, M = opts["K"], opts["M"]
    if K is not None and len(d) == 1:
        d = d * K
    if M is not None and len(alpha) == 1:
        alpha = alpha * M
    if (K is not None and len(d) != K) or (M is not None and len(alpha) != M):
        parser.error("--d/--alpha lengths do not match --K/--M")
    try:
        inst = MacInstance(tuple(d), tuple(alpha))
    except ValueError as exc:
        parser.error(str(exc))
    result = mac_region_contains(inst)
    report = {"K": inst.K, "M": inst.M, "d": list(inst.d), "alpha": list(inst.alpha), **result.to_dict()}
    ok = result.contained
    if opts["oracle"]:
        if inst.K > 8 or inst.M > 8:
            parser.error("oracle mode supports K, M <= 8")
        agree = oracle_agreement(inst.K, inst.M, inst.alpha, opts["p_grid"], opts["trials"], opts["seed"])
        rows = [{"subset": list(u), "slope": s, "predicted": p, "ok": abs(s - p) <= ORACLE_TOL}
                for u, (s, p) in agree.items()]
        report["oracle"] = rows
        report["oracle_ok"] = all(r["ok"] for r in rows)
        ok &= report["oracle_ok"]
    _emit(json.dumps(report, indent=2) + "\n", opts["out"])
    return 0 if ok else 1


COMMANDS = {"dof": cmd_dof, "figures": cmd_figures, "simulate": cmd_simulate, "mac-check": cmd_mac_check}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    opts = merge_options(parser, args)
    return COMMANDS[args.command](parser, opts)


if __name__ == "__main__":
    sys.exit(main())
