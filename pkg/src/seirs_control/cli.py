"""Command-line front end.

    seirs-control solve   --config run.ini --out traj.csv
    seirs-control compare --config run.ini --out compare.csv
    seirs-control sweep   --config run.ini --param gamma --from 0 --to 0.1 --step 0.01 --out sweep_dir

Exit status: 0 when every solve converged, 1 on usage/config/IO errors,
2 when a solve hit the iteration cap or the integration blew up.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from seirs_control.errors import ConfigError, IntegrationDiverged
from seirs_control.scenario import (
    Scenario,
    SweepSpec,
    expand_sweep,
    parse_scenario,
    serialize_scenario,
    table1_default,
)
from seirs_control.sweep import Solution, SweepConfig, solve_uncontrolled, sweep

log = logging.getLogger(__name__)

SOLVE_HEADER = "t,S,E,I,R,p1,p2,p3,p4,T,V"
COMPARE_HEADER = "t,S_c,E_c,I_c,R_c,S_u,E_u,I_u,R_u,T,V"
MEMBER_HEADER = "t,I,T,V"
INDEX_HEADER = "param_value,J,iterations,converged"

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2


@dataclass
class RunReport:
    fingerprint: str
    cost: float
    iterations: int
    converged: bool
    outputs: list[Path] = field(default_factory=list)
    extra: dict[str, float] = field(default_factory=dict)


def _fmt(x: float) -> str:
    # + 0.0 turns -0.0 into 0.0 so equal values print identically
    return format(float(x) + 0.0, ".17g")


def write_csv(path: Path, header: str, columns: Sequence[np.ndarray]) -> None:
    rows = np.column_stack(columns).tolist()
    lines = [header]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def fingerprint(scenario: Scenario, cfg: SweepConfig) -> str:
    """Content hash of the resolved scenario and solver settings; comments and layout do not enter."""
    text = serialize_scenario(scenario) + repr(cfg)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def load_scenario(config: str | Path | None, per: float | None = None) -> Scenario:
    scenario = table1_default() if config is None else parse_scenario(Path(config).read_text(encoding="utf-8"))
    if per is not None:
        scenario = replace(scenario, per=per)
    return scenario


def make_config(steps=None, tol=None, max_iter=None, damping=None) -> SweepConfig:
    kw = {}
    if steps is not None:
        kw["n_steps"] = steps
    if tol is not None:
        kw["tolerance"] = tol
    if max_iter is not None:
        kw["max_iterations"] = max_iter
    if damping is not None:
        kw["damping"] = damping
    return SweepConfig(**kw)


def cmd_solve(config, out, *, steps=None, tol=None, max_iter=None, damping=None, per=None) -> RunReport:
    scenario = load_scenario(config, per)
    cfg = make_config(steps, tol, max_iter, damping)
    sol = sweep(cfg, scenario)
    tr = sol.trajectory
    write_csv(out, SOLVE_HEADER, [tr.t, tr.states, tr.adjoints, tr.controls])
    return RunReport(fingerprint(scenario, cfg), sol.cost, sol.iterations, sol.converged, [Path(out)])


def cmd_compare(config, out, *, steps=None, tol=None, max_iter=None, damping=None, per=None) -> RunReport:
    scenario = load_scenario(config, per)
    cfg = make_config(steps, tol, max_iter, damping)
    ctrl = sweep(cfg, scenario)
    free = solve_uncontrolled(cfg, scenario)
    c, u = ctrl.trajectory, free.trajectory
    write_csv(out, COMPARE_HEADER, [c.t, c.states, u.states, c.controls])
    ratio = ctrl.cost / free.cost if free.cost else float("nan")
    return RunReport(
        fingerprint(scenario, cfg),
        ctrl.cost,
        ctrl.iterations,
        ctrl.converged,
        [Path(out)],
        {"J_uncontrolled": free.cost, "ratio": ratio},
    )


def _sweep_member(args) -> tuple[float, float, int, bool]:
    value, scenario, cfg, path = args
    sol: Solution = sweep(cfg, scenario)
    tr = sol.trajectory
    write_csv(path, MEMBER_HEADER, [tr.t, tr.I, tr.T, tr.V])
    return value, sol.cost, sol.iterations, sol.converged


def cmd_sweep(
    config,
    param: str,
    start: float,
    stop: float,
    step: float,
    out,
    *,
    steps=None,
    tol=None,
    max_iter=None,
    damping=None,
    per=None,
    workers: int = 1,
) -> RunReport:
    """Solve one scenario per swept value; ``out`` is a directory.

    Writes ``<param>_<k>.csv`` per member and ``index.csv`` summarizing all.
    """
    base = load_scenario(config, per)
    cfg = make_config(steps, tol, max_iter, damping)
    members = expand_sweep(SweepSpec(param, start, stop, step), base)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(v, s, cfg, out / f"{param}_{k:03d}.csv") for k, (v, s) in enumerate(members)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_member, jobs))
    else:
        results = [_sweep_member(job) for job in jobs]

    index = out / "index.csv"
    with open(index, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(INDEX_HEADER + "\n")
        for value, cost, iters, conv in results:
            fh.write(f"{_fmt(value)},{_fmt(cost)},{iters},{'true' if conv else 'false'}\n")
    return RunReport(
        fingerprint(base, cfg) + f":{param}:{_fmt(start)}:{_fmt(stop)}:{_fmt(step)}",
        float("nan"),
        sum(r[2] for r in results),
        all(r[3] for r in results),
        [index] + [job[3] for job in jobs],
        {"members": float(len(results)), "failed": float(sum(not r[3] for r in results))},
    )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seirs-control", description="Optimal treatment/vaccination for a periodic SEIRS model.")
    parser.add_argument("--verbose", action="store_true", help="log sweep iterations")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="scenario config (INI); reference defaults when omitted")
        p.add_argument("--out", required=True, help="output CSV (solve/compare) or directory (sweep)")
        p.add_argument("--steps", type=int, help="RK4 steps over [0, tf] (default 2500)")
        p.add_argument("--tol", type=float, help="relative convergence tolerance (default 0.01)")
        p.add_argument("--max-iter", type=int, help="iteration cap (default 100)")
        p.add_argument("--damping", type=float, help="weight kept on the previous controls, in [0, 1)")
        p.add_argument("--per", type=float, help="forcing amplitude, overrides the config")

    common(sub.add_parser("solve", help="solve one scenario"))
    common(sub.add_parser("compare", help="controlled vs uncontrolled trajectories"))
    sw = sub.add_parser("sweep", help="solve over a range of one rate parameter")
    common(sw)
    sw.add_argument("--param", required=True, choices=["mu", "gamma", "epsilon", "eta"])
    sw.add_argument("--from", dest="start", type=float, required=True)
    sw.add_argument("--to", dest="stop", type=float, required=True)
    sw.add_argument("--step", type=float, required=True)
    sw.add_argument("--workers", type=int, default=1)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    common = dict(steps=args.steps, tol=args.tol, max_iter=args.max_iter, damping=args.damping, per=args.per)
    try:
        if args.command == "solve":
            rep = cmd_solve(args.config, args.out, **common)
            print(f"J = {rep.cost:.10g}")
            print(f"iterations = {rep.iterations}  converged = {rep.converged}")
        elif args.command == "compare":
            rep = cmd_compare(args.config, args.out, **common)
            print(f"J_controlled = {rep.cost:.10g}")
            print(f"J_uncontrolled = {rep.extra['J_uncontrolled']:.10g}")
            print(f"ratio = {rep.extra['ratio']:.10g}")
            print(f"iterations = {rep.iterations}  converged = {rep.converged}")
        else:
            rep = cmd_sweep(
                args.config, args.param, args.start, args.stop, args.step, args.out, workers=args.workers, **common
            )
            print(f"members = {int(rep.extra['members'])}  failed = {int(rep.extra['failed'])}")
            print(f"index = {rep.outputs[0]}")
        print(f"fingerprint = {rep.fingerprint}")
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except IntegrationDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK if rep.converged else EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
