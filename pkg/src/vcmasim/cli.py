"""Command line front end: one subcommand per experiment.

Exit status is 0 on success, 1 for invalid input and 2 for numerical
failures.  Outputs are written only once a run has finished, so a failed run
leaves no files behind.
"""
import argparse
import json
import os
from pathlib import Path
import shutil
import sys
import tempfile

import numpy as np

from . import analysis, crossbar, montecarlo
from .config import EXPERIMENT_DEFAULTS, ConfigError, replay_record, resolve, validate
from .device import critical_voltages, demag_factors
from .waveform import Waveform


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--seed", type=int, metavar="N")
    common.add_argument("--trials", type=int, metavar="N", help="Monte Carlo trials per point")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--threads", type=int, metavar="N", help="worker threads (results do not depend on it)")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config entry, e.g. device.r_p=7000 or experiment.widths=[1e-9]")
    parser = _Parser(prog="vcmasim", description="VCMA MTJ macrospin switching simulator")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    helps = {
        "sweep-width": "switching probability versus pulse width",
        "sweep-amplitude": "switching probability versus pulse amplitude",
        "combined": "VCMA+STT pulse against pure STT",
        "half-select": "full versus half-selected set pulse",
        "field-map": "deterministic velocity field and field-strength ordering",
        "exit-hist": "exit azimuths around the south pole",
        "xbar-write": "V/2 crossbar write: classes, disturb, energy",
        "sneak": "floating-line sneak currents",
        "validate": "run the built-in invariant checks",
    }
    for name in EXPERIMENT_DEFAULTS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


class _Outputs:
    """Collects output files in a scratch directory and publishes them together."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.files = {}

    def text(self, name, writer):
        self.files[name] = writer

    def publish(self):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        tmp = Path(tempfile.mkdtemp(prefix=".partial-", dir=self.out_dir))
        try:
            for name, writer in self.files.items():
                writer(tmp / name)
            for name in self.files:
                os.replace(tmp / name, self.out_dir / name)
        finally:
            shutil.rmtree(tmp, ignore_errors=True)
        return [self.out_dir / n for n in self.files]


def _json_writer(doc):
    def write(path):
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return write


def _curve_summary(curve):
    return [f"  {x:.4g}  P = {e.p:.4f}  [{e.ci_low:.4f}, {e.ci_high:.4f}]"
            for x, e in zip(curve.x, curve.estimates)]


def _run(command, cfg, outputs):
    device, solver = validate(cfg)
    exp = cfg["experiment"]
    seed, n, threads = cfg["seed"], cfg["n_trials"], cfg["threads"]
    record = replay_record(command, cfg)
    meta = {"config": record, "seed": seed}
    outputs.text(f"{command}.config.json", _json_writer(record))
    lines = []

    if command == "sweep-width":
        curve = montecarlo.sweep_width(exp["amplitude"], exp["widths"], device, solver, n, seed, threads)
        outputs.text("sweep-width.csv", lambda p: curve.to_csv(p, meta))
        lines += _curve_summary(curve)
    elif command == "sweep-amplitude":
        curve = montecarlo.sweep_amplitude(exp["width"], exp["amplitudes"], device, solver, n, seed, threads)
        outputs.text("sweep-amplitude.csv", lambda p: curve.to_csv(p, meta))
        lines += _curve_summary(curve)
    elif command in ("combined", "half-select"):
        fn = montecarlo.compare_pure_stt if command == "combined" else montecarlo.half_select_contrast
        a, b = fn(exp["follow_widths"], device, solver, n, seed, threads,
                  exp["u_vcma"], exp["w_vcma"], exp["u_stt"])
        names = ("combined", "pure-stt") if command == "combined" else ("full", "half")
        outputs.text(f"{command}-{names[0]}.csv", lambda p: a.to_csv(p, meta))
        outputs.text(f"{command}-{names[1]}.csv", lambda p: b.to_csv(p, meta))
        for name, c in zip(names, (a, b)):
            lines += [name] + _curve_summary(c)
    elif command == "field-map":
        fm = analysis.velocity_field_map(exp["amplitude"], device, exp["grid_n"], exp["cap_angle"],
                                         exp["include_stt"], exp["precession"])
        cap = exp["cap_angle"] if exp["cap_angle"] is not None else np.pi / 6
        verdicts = {m: analysis.ordering_in_cap(exp["amplitude"], device, cap, exp["grid_n"], metric=m)
                    for m in ("stiffness", "magnitude")}
        doc = {"config": record, "seed": seed,
               "demag_factors": list(demag_factors(device)),
               "critical_voltages": list(critical_voltages(device)),
               "ordering": {m: {"order": v.label, "agreement": v.agreement, "points": v.n_points,
                                "tilt": v.tilt} for m, v in verdicts.items()}}
        if fm.precession is not None:
            doc["precession_fields"] = {f"H{a}": fm.precession[k].T.tolist() for k, a in enumerate("xyz")}
        outputs.text("field-map.csv", lambda p: fm.to_csv(p, meta))
        outputs.text("field-map.json", _json_writer(doc))
        lines += [f"  {m}: {v.label} ({v.agreement:.0%} of {v.n_points})" for m, v in verdicts.items()]
    elif command == "exit-hist":
        hist = analysis.exit_histogram(exp["amplitude"], device, solver, n, seed, exp["theta_exit"],
                                       exp["width"], exp["bins"], threads=threads)
        doc = {"config": record, "seed": seed, "c2_robustness_metric": hist.c2,
               "n_exit": int(hist.phis.size), "n_no_exit": hist.n_no_exit,
               "window_axis_rad": hist.window_axis}
        outputs.text("exit-hist.csv", lambda p: hist.to_csv(p, meta))
        outputs.text("exit-hist.json", _json_writer(doc))
        lines.append(f"  C2 = {hist.c2:.3f}, exits {hist.phis.size}, no exit {hist.n_no_exit}")
    elif command == "xbar-write":
        doc = _xbar_write(exp, device, solver, n, seed, threads)
        doc.update(config=record, seed=seed)
        outputs.text("xbar-write.json", _json_writer(doc))
        lines.append(f"  counts {doc['counts']}, expected disturbed "
                     f"{doc['disturb']['expected_disturbed']:.4g}, total energy {doc['energy']['total']:.4g} J")
    elif command == "sneak":
        spec = crossbar.CrossbarSpec(exp["rows"], exp["cols"], _states(exp), device)
        res = crossbar.sneak_solve(spec, exp["driven_row"], exp["driven_col"], exp["amplitude"])
        doc = {"config": record, "seed": seed, "currents": res.to_dict(),
               "selected_current": float(res.currents[exp["driven_row"], exp["driven_col"]])}
        outputs.text("sneak.json", _json_writer(doc))
        lines.append(f"  selected current {doc['selected_current']:.4g} A, residual {res.residual:.2e}")
    return lines


def _states(exp):
    s = exp["states"]
    if isinstance(s, str) and s.upper() in ("P", "AP"):
        return np.full((exp["rows"], exp["cols"]), s.upper())
    if isinstance(s, str):
        return crossbar.read_state_grid(s)
    return np.asarray(s)


def _xbar_write(exp, device, solver, n, seed, threads):
    spec = crossbar.CrossbarSpec(exp["rows"], exp["cols"], _states(exp), device)
    wave = Waveform.from_list(exp["waveform"])
    req = crossbar.WriteRequest(tuple(exp["target"]), wave)
    _, counts = crossbar.classify(spec, req.target)
    p_sel, p_half, estimates = exp["p_sel"], exp["p_half"], {}
    if p_sel is None:
        est = montecarlo.estimate_probability(wave, device, solver, n, seed, 0, threads)
        p_sel, estimates["p_sel"] = est.p, [est.ci_low, est.ci_high]
    if p_half is None:
        est = montecarlo.estimate_probability(wave.half_select(), device, solver, n, seed, 1, threads)
        p_half, estimates["p_half"] = est.p, [est.ci_low, est.ci_high]
    dist = crossbar.write_disturb(spec, p_sel, p_half)
    g = spec.conductances()
    cls, _ = crossbar.classify(spec, req.target)
    currents = {}
    for c, name in zip(crossbar.CellClass, ("selected", "half", "unselected")):
        frac = crossbar.CLASS_VOLTAGE_FRACTION[c]
        currents[name] = [float(frac * u * g[cls == c].sum()) for u, _ in wave.segments]
    return {"counts": dict(zip(("selected", "half", "unselected"), counts)),
            "p_sel": p_sel, "p_half": p_half, "probability_ci": estimates,
            "disturb": dist.to_dict(), "energy": crossbar.write_energy(spec, req),
            "currents": currents}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a command is required")
        cfg = resolve(args.command, args.config, args.set, args.seed, args.trials, args.out, args.threads)
    except (UsageError, ConfigError) as exc:
        print(f"vcmasim: error: {exc}", file=sys.stderr)
        return 1

    if args.command == "validate":
        results = validation_results()
        for name, ok, detail in results:
            print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        return 0 if all(ok for _, ok, _ in results) else 1

    outputs = _Outputs(cfg["output"])
    try:
        lines = _run(args.command, cfg, outputs)
        written = outputs.publish()
    except (crossbar.SolverError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"vcmasim: solver error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError, IndexError, KeyError, OSError) as exc:
        print(f"vcmasim: error: {exc}", file=sys.stderr)
        return 1
    print(f"{args.command} (seed {cfg['seed']})")
    for line in lines:
        print(line)
    for path in written:
        print(f"wrote {path}")
    return 0


def validation_results():
    from .validation import run_checks
    return run_checks()


if __name__ == "__main__":
    sys.exit(main())
