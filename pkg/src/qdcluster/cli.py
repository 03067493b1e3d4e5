"""Command-line front end.

    qdcluster table table1
    qdcluster ratio --schedule gen:m-step:8 --b 10
    qdcluster simulate --schedule gen:three-step --n 6,8,10
    qdcluster synth --cancel 2,3,4,5,6 --family window --period 8

Exit codes: 0 ok, 2 usage or precondition error, 3 infeasible synthesis,
4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from .geometry import DEFAULT_KMAX, Lattice, MoleculeGeometry, e_plus, e_zero, g
from .schedule import (
    Schedule,
    ScheduleError,
    bulk_coefficients,
    chain_period,
    gen_2d_three_step,
    gen_m_step,
    gen_one_step,
    gen_three_step,
    net_coupling,
    residual_ratio,
    step_signs,
)
from .simulator import (
    fidelity_analytic,
    perturbed_run,
    residual_phases,
    schedule_fidelity,
)
from .synthesis import (
    TargetProfile,
    VerificationError,
    family_from_spec,
    load_target,
    solve_durations,
    verify,
)

EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_VERIFY = 4

GENERATORS = ("one-step", "three-step", "m-step", "2d-three-step")


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ helpers


def signed(c: Fraction) -> str:
    if c == 0:
        return "0"
    return f"+{c}" if c > 0 else str(c)


def parse_ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def lattice_from_args(args, default_n: int = 10) -> Lattice:
    if args.rows or args.cols:
        if not (args.rows and args.cols):
            raise UsageError("--rows and --cols must be given together")
        return Lattice.grid(args.rows, args.cols)
    n = args.n if isinstance(args.n, int) else default_n
    return Lattice.chain(n)


def build_schedule(spec: str, lattice: Lattice) -> Schedule:
    """``gen:name[:param]`` or ``file:path``."""
    kind, _, rest = spec.partition(":")
    if kind == "file":
        return Schedule.from_text(Path(rest).read_text())
    if kind != "gen":
        raise UsageError(f"schedule must be gen:<name> or file:<path>, got {spec!r}")
    name, _, param = rest.partition(":")
    if name == "one-step":
        return gen_one_step(lattice)
    if name == "three-step":
        return gen_three_step(lattice)
    if name == "m-step":
        if not param:
            raise UsageError("gen:m-step needs the period, e.g. gen:m-step:8")
        return gen_m_step(lattice, int(param))
    if name in ("2d-three-step", "2d"):
        return gen_2d_three_step(lattice)
    raise UsageError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")


def emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ----------------------------------------------------------------- commands


def cmd_couplings(args, geom):
    lattice = lattice_from_args(args)
    seps = sorted({round(lattice.separation(p, q), 12) for p, q in lattice.pairs()})
    rows = []
    for k in seps:
        d = k * geom.b
        rows.append([f"{k:.12g}", f"{e_zero(geom, d):.12g}", f"{e_plus(geom, d):.12g}", f"{g(geom, k):.12g}"])
    return to_csv(["separation", "e_zero", "e_plus", "g"], rows)


def table_rows(kind: str, m: int | None) -> tuple[list[int], list[tuple[str, list[str]]]]:
    if kind == "table1":
        sched = gen_three_step(Lattice.chain(16))
        ks = list(range(1, 8))
        rows = []
        for label, signs, step in zip("abc", step_signs(sched, 0, ks), sched.steps):
            rows.append((f"({label})", [signed(s * step.duration) for s in signs]))
        rows.append(("Total", [signed(c) for c in bulk_coefficients(sched, 0, ks)]))
        return ks, rows
    if m is None or not 4 <= m <= 8:
        raise UsageError(f"table2 needs --m with 4 <= m <= 8 (last step lasts (8-m)/4), got {m}")
    sched = gen_m_step(Lattice.chain(4 * m), m)
    ks = list(range(1, m + 3))
    signs = step_signs(sched, 0, ks)
    rows = [(f"({s + 1})", ["+" if v > 0 else "-" for v in signs[s]]) for s in range(m)]
    rows.append((f"(1)~({m})", [str(sum(signs[s][i] for s in range(m))) for i in range(len(ks))]))
    rows.append((f"({m + 1})", [str(8 - m)] * len(ks)))
    rows.append(("Total", [str(4 * c) for c in bulk_coefficients(sched, 0, ks)]))
    return ks, rows


def cmd_table(args, geom):
    ks, rows = table_rows(args.kind, args.m)
    if args.format == "csv":
        return to_csv(["row"] + [f"k={k}" for k in ks], [[lab] + vals for lab, vals in rows])
    unit = "E+(a,kb)" if args.kind == "table1" else "E+(a,kb)/4"
    lines = [f"k: {' '.join(map(str, ks))}"]
    lines += [f"{lab}: {' '.join(vals)}" for lab, vals in rows]
    lines.append(f"units: {unit}; reference qubit j at the pattern anchor")
    return "\n".join(lines) + "\n"


def _ratio_lattice(args) -> Lattice:
    # long enough for two periods of every built-in protocol
    return Lattice.chain(args.n if isinstance(args.n, int) else 32)


def cmd_ratio(args, geom):
    rows = []
    for spec in args.schedule:
        sched = build_schedule(spec, _ratio_lattice(args))
        r = residual_ratio(sched, geom, k_max=args.kmax, tol=args.tol)
        rows.append([spec, f"{geom.b / geom.a:g}", f"{r:.3g}"])
    return to_csv(["schedule", "b_over_a", "ratio"], rows)


def _sizes(args) -> list[Lattice]:
    if args.rows or args.cols:
        return [lattice_from_args(args)]
    ns = args.n if isinstance(args.n, list) else [args.n or 10]
    return [Lattice.chain(n) for n in ns]


def cmd_simulate(args, geom):
    rows = []
    for lattice in _sizes(args):
        for spec in args.schedule:
            sched = build_schedule(spec, lattice)
            f = schedule_fidelity(sched, geom)
            check = fidelity_analytic(residual_phases(sched, geom))
            if abs(f - check) > 1e-10:
                raise VerificationError([("fidelity", check, f, -1)])
            label = lattice.shape[0] if lattice.is_chain else "x".join(map(str, lattice.shape))
            rows.append([label, spec, f"{f:.15g}"])
    return to_csv(["N", "schedule", "fidelity"], rows)


def cmd_jitter(args, geom):
    rows = []
    for lattice in _sizes(args):
        for spec in args.schedule:
            sched = build_schedule(spec, lattice)
            for i in range(args.samples):
                seed = args.seed + i
                f = perturbed_run(sched, geom, args.jitter, seed)
                rows.append([lattice.size, spec, seed, f"{f:.15g}"])
    return to_csv(["N", "schedule", "seed", "fidelity"], rows)


def cmd_schedule_gen(args, geom):
    sched = build_schedule(args.schedule[0], lattice_from_args(args))
    if args.format == "json":
        doc = {
            "lattice": list(sched.lattice.shape),
            "total_time": str(sched.total_time),
            "steps": [{"duration": str(s.duration), "charges": str(s.config)} for s in sched.steps],
        }
        return json.dumps(doc, indent=2) + "\n"
    return sched.to_text()


def cmd_schedule_verify(args, geom):
    sched = build_schedule(args.schedule[0], lattice_from_args(args))
    coupling = net_coupling(sched)
    lattice = sched.lattice
    cancel = set(parse_ints(args.cancel)) if args.cancel else set()
    bad = []
    for (p, q), c in coupling.items():
        sep = lattice.separation(p, q)
        if abs(sep - 1) < 1e-9 and c != 1:
            bad.append((1, Fraction(1), c, p))
        elif lattice.is_chain and (q - p) in cancel and c != 0:
            bad.append((q - p, Fraction(0), c, p))
    rows = [["total_time", str(sched.total_time)]]
    if lattice.is_chain:
        try:
            period = chain_period(sched)
            coeffs = bulk_coefficients(sched, 0, range(1, period + 3))
            rows += [[f"c(k={k})", str(c)] for k, c in enumerate(coeffs, 1)]
        except ScheduleError:
            pass
    if bad:
        raise VerificationError(bad)
    return to_csv(["quantity", "value"], rows)


def cmd_synth(args, geom):
    if args.target:
        target, family = load_target(Path(args.target).read_text())
    else:
        if args.period is None:
            raise UsageError("synth needs --target FILE or --period")
        target = TargetProfile(Fraction(args.nearest), parse_ints(args.cancel or ""))
        family = family_from_spec({"kind": args.family, "period": args.period, "neutral": args.neutral})
    n = args.n if isinstance(args.n, int) else None
    result = solve_durations(family, target, n_sites=n)
    if not result.feasible:
        sys.stderr.write(f"infeasible: {result.message}\n")
        emit(args, json.dumps(result.to_json(), indent=2) + "\n" if args.format == "json" else "")
        return None, EXIT_INFEASIBLE
    report = verify(result, result.schedule.lattice, geom, k_max=args.kmax, tol=args.tol)
    if args.format == "json":
        doc = result.to_json()
        doc["residual_ratio"] = report.residual_ratio
        return json.dumps(doc, indent=2) + "\n"
    lines = [result.schedule.to_text().rstrip("\n"), ""]
    lines.append("residue,k,coefficient")
    for j, row in result.certificate.items():
        lines += [f"{j},{k},{c}" for k, c in row.items()]
    lines.append(f"# total_time {result.total_time}; residual_ratio {report.residual_ratio:.3g}")
    return "\n".join(lines) + "\n"


COMMANDS = {
    "couplings": cmd_couplings,
    "table": cmd_table,
    "schedule-gen": cmd_schedule_gen,
    "schedule-verify": cmd_schedule_verify,
    "ratio": cmd_ratio,
    "simulate": cmd_simulate,
    "synth": cmd_synth,
    "jitter": cmd_jitter,
}


def _n_arg(text: str):
    vals = [int(v) for v in text.split(",")]
    return vals[0] if len(vals) == 1 else vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=float, default=1.0, help="intra-molecule dot spacing")
    common.add_argument("--b", type=float, default=10.0, help="inter-molecule spacing")
    common.add_argument("--n", type=_n_arg, default=None, help="chain length (comma list for sweeps)")
    common.add_argument("--rows", type=int, default=None)
    common.add_argument("--cols", type=int, default=None)
    common.add_argument("--schedule", action="append", default=None, help="gen:name[:param] or file:path")
    common.add_argument("--kmax", type=int, default=DEFAULT_KMAX)
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jitter", type=float, default=0.05)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("csv", "json", "text"), default=None)

    parser = argparse.ArgumentParser(prog="qdcluster", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("couplings", parents=[common], help="pair coupling strengths")
    p = sub.add_parser("table", parents=[common], help="reproduce the coefficient tables")
    p.add_argument("kind", choices=("table1", "table2"))
    p.add_argument("--m", type=int, default=None)
    sub.add_parser("schedule-gen", parents=[common], help="write a generated schedule")
    p = sub.add_parser("schedule-verify", parents=[common], help="check a schedule's net couplings")
    p.add_argument("--cancel", default=None, help="separations that must vanish, e.g. 2,6")
    sub.add_parser("ratio", parents=[common], help="residual long-range coupling ratio")
    sub.add_parser("simulate", parents=[common], help="cluster-state fidelity")
    p = sub.add_parser("synth", parents=[common], help="search for a cancelling schedule")
    p.add_argument("--target", default=None, help="JSON target document")
    p.add_argument("--cancel", default=None)
    p.add_argument("--nearest", default="1")
    p.add_argument("--family", choices=("window", "enum"), default="window")
    p.add_argument("--period", type=int, default=None)
    p.add_argument("--neutral", action="store_true", help="admit (1,1) sites in enumerated patterns")
    p = sub.add_parser("jitter", parents=[common], help="fidelity under random distance jitter")
    p.add_argument("--samples", type=int, default=100)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schedule is None:
        args.schedule = ["gen:one-step"]
    if args.format is None:
        args.format = "text" if args.command in ("table", "schedule-gen", "synth") else "csv"
    try:
        geom = MoleculeGeometry(args.a, args.b)
        out = COMMANDS[args.command](args, geom)
        code = 0
        if isinstance(out, tuple):
            out, code = out
        if out is not None:
            emit(args, out)
        return code
    except VerificationError as exc:
        sys.stderr.write(f"verification failed: {exc}\n")
        return EXIT_VERIFY
    except (UsageError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
