"""Command-line entry point: ``cvsynth <subcommand> [flags]``.

Every subcommand writes either a JSON report (plan-kerr, decompose, gkp,
ft-budget, sample, verify) or CSV (tables, curves) to stdout, or to
``--out``.  ``sample`` writes its outcome CSV to ``--out`` and the report
to stdout.

Exit codes: 0 on success, 2 on usage or input errors, 3 when ``verify``
finds a failing check.

An optional ``--config FILE`` supplies defaults as ``key = value`` lines.
Keys are flag names without dashes (``eps-th`` or ``eps_th``).  Lines
before any ``[section]`` header apply to every subcommand; a section named
after a subcommand applies only to it.  Flags given on the command line
win.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import comb, ftcalc, gridsim, kerrplan, sampler, symplectic, weyl
from .errors import CVError, UnknownTable

__all__ = ["Report", "SCHEMA_VERSION", "TABLE_NAMES", "CURVE_NAMES", "emit_table", "emit_curve", "run", "main"]

SCHEMA_VERSION = "1.0"
PRINTED_GKP_TABLE = {
    1: {"db": "5", "overlap": "0.9976", "coefficient": "1.7"},
    2: {"db": "8", "overlap": "0.9986", "coefficient": "6.3"},
    3: {"db": "11", "overlap": "0.9997", "coefficient": "1.2e2"},
    4: {"db": "14", "overlap": "0.9999", "coefficient": "5.6e4"},
}
# squeezing quoted for the minimal CVIQP iteration count
QUOTED_DB = {m: row["db"] for m, row in PRINTED_GKP_TABLE.items()} | {6: "19"}


@dataclass
class Report:
    """Machine-readable command result.

    ``sources`` maps each top-level output key to a reference tag from
    ``refs`` or to ``"derived"``.
    """

    command: str
    inputs: dict
    outputs: dict = field(default_factory=dict)
    sources: dict = field(default_factory=dict)
    refs: list = field(default_factory=list)
    discrepancies: list = field(default_factory=list)
    runtime_ms: float = 0.0

    def put(self, key: str, value, source: str = "derived") -> None:
        self.outputs[key] = value
        self.sources[key] = source
        if source != "derived" and source not in self.refs:
            self.refs.append(source)

    def flag(self, quantity: str, reference_value, computed_value, note: str) -> None:
        self.discrepancies.append(
            {"quantity": quantity, "reference_value": reference_value, "computed_value": computed_value, "note": note}
        )

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "sources": self.sources,
            "refs": self.refs,
            "discrepancies": self.discrepancies,
            "runtime_ms": self.runtime_ms,
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):
        return x.value
    return x


# ------------------------------------------------------------------- CSV


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else f"{float(v):.6g}"
    return str(v)


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _table_gkp_binom(args) -> str:
    rows = []
    for m in range(1, 5):
        sig = comb.sigma_of_m(m)
        ref = PRINTED_GKP_TABLE[m]
        rows.append(
            [
                m,
                sig["sigma"],
                sig["squeezing_db"],
                ref["db"],
                comb.overlap_gaussian(m),
                ref["overlap"],
                comb.success_coefficient(m),
                ref["coefficient"],
            ]
        )
    return _csv(
        ["m", "sigma", "squeezing_db", "reference_db", "overlap", "reference_overlap", "success_coefficient",
         "reference_coefficient"],
        rows,
    )  # fmt: skip


def _table_params(model: str, m: int, y: float) -> Callable:
    def emit(args) -> str:
        tab = ftcalc.gate_parameter_table(model, m, y, args.p_rounding)
        rows = [
            [r.symbol, r.evolution, r.step, r.computed, r.printed or "", "" if r.match is None else r.match, r.note]
            for r in tab.rows
        ]
        return _csv(["symbol", "evolution", "step", "computed", "reference", "match", "note"], rows)

    return emit


def _table_definitions(args) -> str:
    rows = []
    for m in range(1, 7):
        z = ftcalc.zeta(m)
        rows.append([m, z, 2**m * args.y, z + 2**m * args.y])
    return _csv(["m", "zeta_m", "synthesis_distance", "epsilon_m"], rows)


TABLE_NAMES = {
    "gkp-binom": _table_gkp_binom,
    "params-universal": _table_params("universal", 1, 0.1),
    "params-cviqp": _table_params("cviqp", 6, 1e-3),
    "definitions": _table_definitions,
}


def emit_table(name: str, y: float = 0.1, p_rounding: str = "ceil") -> str:
    """CSV text of a named table.

    Raises
    ------
    UnknownTable
        If ``name`` is not one of :data:`TABLE_NAMES`.
    """
    if name not in TABLE_NAMES:
        raise UnknownTable(f"unknown table {name!r}; choose from {', '.join(TABLE_NAMES)}")
    return TABLE_NAMES[name](argparse.Namespace(y=y, p_rounding=p_rounding))


def _curve_psucc(args) -> str:
    ys = np.logspace(-4, -0.5, args.points)
    rows = [[r["y"], r["literal"], r["gaussian_tail"]] for r in ftcalc.psucc_curve(ys, args.m)]
    return _csv(["y", "p_succ_literal", "p_succ_gaussian_tail"], rows)


def _curve_wavefunction(args) -> str:
    sigma = comb.sigma_of_m(args.m)["sigma"]
    spec = comb.GKPSpec.from_m(args.m)
    half = 2 ** (args.m - 1) * 2 * comb.SQRT_PI + 6 * sigma
    qs = np.linspace(-half, half, args.points)
    b = comb.binomial_wavefunction(args.m, sigma, qs)
    g = comb.gaussian_gkp_wavefunction(spec, 0, qs)
    return _csv(["q", "binomial", "gaussian"], [[x, u, v] for x, u, v in zip(qs, b, g)])


CURVE_NAMES = {"psucc-vs-y": _curve_psucc, "gkp-wavefunction": _curve_wavefunction}


def emit_curve(name: str, m: int = 1, points: int = 200) -> str:
    if name not in CURVE_NAMES:
        raise UnknownTable(f"unknown curve {name!r}; choose from {', '.join(CURVE_NAMES)}")
    return CURVE_NAMES[name](argparse.Namespace(m=m, points=points))


# ------------------------------------------------------------- commands


def _cmd_plan_kerr(args, rep: Report) -> int:
    kp = kerrplan.plan(args.y, args.p_rounding)
    raw = kerrplan.raw_parameters(args.y)
    cr = kerrplan.count_report(args.y, args.p_rounding)
    rep.put("raw_parameters", raw)
    rep.put("plan", kp.to_json())
    rep.put("counts", cr.to_json(), "gate-count-estimate")
    rep.flag(
        "asymptotic gate count",
        cr.printed_asymptotic,
        cr.internally_consistent_asymptotic,
        cr.flags[0],
    )
    rep.flag("gate-count scaling exponent", -3, -5, cr.flags[1])
    tab = ftcalc.PRINTED_TABLES.get(("universal", 1, 0.1)) if math.isclose(args.y, 0.1) else None
    if tab:
        ang = kp.derived_angles
        for sym, key in (("b2", "cz_small"), ("c1", "cubic_small"), ("c2", "cubic_big")):
            if not ftcalc.matches_printed(ang[key], tab[sym]):
                rep.flag(f"angle {sym}", tab[sym], ang[key], f"does not round to the reference value with p_rounding={args.p_rounding}")
    if args.materialize:
        seq = kerrplan.materialize(kp, cap=args.cap)
        kinds: dict[str, int] = {}
        for g in seq:
            kinds[g.kind.value] = kinds.get(g.kind.value, 0) + 1
        rep.put("materialized", {"length": len(seq.gates), "by_kind": kinds})
    return 0


def _decompose_target(args) -> tuple[symplectic.GateSequence, np.ndarray]:
    if args.gate == "squeeze":
        g = symplectic.squeeze(args.param)
        return symplectic.decompose_squeeze(args.param), symplectic.symplectic_of(g, 1)
    if args.gate == "rotation":
        g = symplectic.rotation(args.param)
        return symplectic.decompose_rotation(args.param), symplectic.symplectic_of(g, 1)
    g = symplectic.beamsplitter(args.param)
    return symplectic.decompose_beamsplitter(args.param, form=args.form), symplectic.symplectic_of(g, 2)


def _cmd_decompose(args, rep: Report) -> int:
    seq, target = _decompose_target(args)
    got = symplectic.compose(seq, target.shape[0] // 2)
    rep.put("gates", seq.to_json())
    rep.put("residual", float(np.max(np.abs(got - target))))
    return 0


def _cmd_gkp(args, rep: Report) -> int:
    sig = comb.sigma_of_m(args.m)
    sigma = args.sigma if args.sigma is not None else sig["sigma"]
    res = comb.synthesize_gkp(args.m, sigma, args.eta)
    row = {
        "m": args.m,
        "sigma": sigma,
        "squeezing_db": comb.squeezing_db(sigma),
        "overlap": comb.overlap_gaussian(args.m),
        "success_coefficient": comb.success_coefficient(args.m),
        "success_probability": res.success_prob,
        "success_probability_closed_form": comb.success_probability(args.m, sigma, args.eta),
        "ratio": str(res.ratio_exact),
        "cat_amplitude": comb.cat_amplitude(args.m, sigma),
        "orthogonal_peaks": res.comb.orthogonal,
    }
    rep.put("row", row, "binomial-gkp-table" if args.m <= 4 else "derived")
    ref_db = QUOTED_DB.get(args.m)
    if ref_db and not ftcalc.matches_printed(row["squeezing_db"], ref_db):
        rep.flag("squeezing_db", ref_db, row["squeezing_db"], "10 log10(2^(m-1) pi) does not round to the reference dB")
    if args.curve:
        Path(args.curve).write_text(emit_curve("gkp-wavefunction", args.m, args.points), newline="")
        rep.put("curve_file", args.curve)
    if args.grid:
        if args.m != 1:
            raise CVError("--grid cross-check is available for m = 1 only")
        K = round(comb.SQRT_PI / args.eta)
        if not math.isclose(K * args.eta, comb.SQRT_PI, rel_tol=1e-12):
            raise CVError("--grid needs eta = sqrt(pi)/K for an integer K")
        g, _ = gridsim.synthesis_m1_on_grid(sigma, K, n=args.grid_points)
        rep.put("grid", {"fidelity": g.fidelity, "success_probability": g.success_prob, "grid_points": args.grid_points})
    return 0


def _cmd_ft_budget(args, rep: Report) -> int:
    if args.model == "cviqp":
        r = ftcalc.cviqp_minimal_m(args.eps_th, args.y, args.convention)
        rep.put("minimal_m", r.__dict__)
        m = r.m_min
    else:
        m = args.m
        b = ftcalc.FTBudget.build(m, args.y, args.eps_q, args.eps_p, args.eps_th)
        rep.put("budget", b.to_json())
        rep.put("p_succ", ftcalc.p_succ(m, args.y, args.convention))
        rep.put("failure_probability", ftcalc.failure_probability(b, args.convention))
        rep.put("threshold_ok", ftcalc.threshold_ok(b, args.convention))
    tab = ftcalc.gate_parameter_table(args.model, m, args.y)
    rep.put("parameters", [r.to_json() for r in tab.rows], f"parameter-table-{args.model}" if any(
        r.printed for r in tab.rows) else "derived")
    for r in tab.mismatches:
        rep.flag(r.symbol, r.printed, r.computed, r.note)
    return 0


def _cmd_tables(args, rep: Report) -> str:
    return emit_table(args.name, args.y, args.p_rounding)


def _cmd_curves(args, rep: Report) -> str:
    return emit_curve(args.name, args.m, args.points)


def _cmd_sample(args, rep: Report) -> int:
    model = (
        sampler.CircuitModel.cviqp(args.m or 6, args.y or 1e-3, args.sigma_in)
        if args.model == "cviqp"
        else sampler.CircuitModel.random_cv(args.m or 1, args.y or 0.1)
    )
    spec = sampler.draw_circuit(model, args.modes, args.depth, args.seed, K=args.K, k_max=args.k_max)
    dist = sampler.simulate_distribution(spec)
    recs = sampler.sample(spec, args.shots, args.seed)
    text = _csv(["shot", "mode", "bin_index", "bin_center"], [[r.shot, r.mode, r.bin_index, r.bin_center] for r in recs])
    if args.out:
        Path(args.out).write_text(text, newline="")
        rep.put("outcome_file", args.out)
    else:
        rep.put("outcomes", [[r.shot, r.mode, r.bin_index] for r in recs])
    rep.put("circuit", spec.to_json())
    rep.put("method", dist.method)
    rep.put("distributions", [d.full().tolist() for d in dist.per_mode])
    return 0


def verify_checks(quick: bool = False) -> list[dict]:
    """Oracle checks; each entry has ``name``, ``value``, ``tolerance`` and ``passed``."""
    out = []

    def check(name, value, tol, ok):
        out.append({"name": name, "value": value, "tolerance": tol, "passed": bool(ok)})

    q, p = weyl.q, weyl.p
    lhs = weyl.commutator(p(1) ** 3, weyl.commutator(p(0) ** 3, q(0) * q(1)))
    check("nested commutator identity", 0.0, 0.0, (lhs + weyl.const(9) * p(0) ** 2 * p(1) ** 2).is_zero())
    e = weyl.expand_number_product()
    check("number product constant", str(e.difference.scalar_part()), 0.0,
          e.difference_is_scalar and e.difference.scalar_part() == weyl.const(Fraction(1, 4)).scalar_part())  # fmt: skip
    res = 0.0
    for s in (0.1, 1.0, 10.0):
        res = max(res, np.abs(symplectic.compose(symplectic.decompose_squeeze(s)) - symplectic.symplectic_of(symplectic.squeeze(s))).max())
    for R in np.linspace(0, 1, 11):
        T = symplectic.symplectic_of(symplectic.beamsplitter(R), 2)
        res = max(res, np.abs(symplectic.compose(symplectic.decompose_beamsplitter(R), 2) - T).max())
    check("gaussian decompositions", float(res), 1e-12, res < 1e-12)
    kp = kerrplan.plan(0.1)
    check("kerr plan integers", [kp.p, kp.k, kp.l], 0, (kp.p, kp.k, kp.l) == (18, 2, 8))
    taus = [1e-3, 1e-2, 1e-1]
    slope = kerrplan.loglog_slope(taus, [kerrplan.verify_splitting(t) for t in taus])
    check("splitting error exponent", slope, 0.3, abs(slope - 3) < 0.3)
    r = comb.synthesize_gkp(3, comb.sigma_of_m(3)["sigma"], 1e-3)
    check("synthesis ratio exact", str(r.ratio_exact), 0, r.ratio_exact == Fraction(6435, 128))
    fk = gridsim.cross_kerr_fock(2.0, 2.0, 40)
    check("cross-kerr cat fidelity", fk.fidelity_lhs_rhs, 1e-8, fk.fidelity_lhs_rhs >= 1 - 1e-8)
    vb = gridsim.vacuum_bin_masses(gridsim.HomodyneSpec(8))
    check("vacuum bins normalized", vb.total, 1e-12, abs(vb.total - 1) < 1e-12)
    z1 = ftcalc.zeta(1)
    check("zeta_1", z1, 5e-3, abs(z1 - 0.069) < 5e-3)
    if not quick:
        g, pred = gridsim.synthesis_m1_on_grid(comb.sigma_of_m(1)["sigma"], 316, n=1024)
        pc = comb.success_probability(1, comb.sigma_of_m(1)["sigma"], comb.SQRT_PI / 316)
        check("grid vs comb fidelity", g.fidelity, 1e-3, g.fidelity >= 0.999)
        check("grid vs comb probability", g.success_prob / pc - 1, 1e-2, abs(g.success_prob / pc - 1) < 1e-2)
    return out


def _cmd_verify(args, rep: Report) -> int:
    checks = verify_checks(args.quick)
    rep.put("checks", checks)
    failed = [c["name"] for c in checks if not c["passed"]]
    rep.put("failed", failed)
    return 3 if failed else 0


# ---------------------------------------------------------------- parser


def _bool(s) -> bool:
    if isinstance(s, bool):
        return s
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cvsynth", description=__doc__.split("\n")[0])
    ap.add_argument("--config", help="key = value defaults file")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--out", help="write the result to this file instead of stdout")
        return sp

    sp = add("plan-kerr", _cmd_plan_kerr, "cross-Kerr compilation plan and gate counts")
    sp.add_argument("--y", type=float, required=True)
    sp.add_argument("--p-rounding", choices=["ceil", "floor"], default="ceil")
    sp.add_argument("--materialize", action="store_true")
    sp.add_argument("--cap", type=int, default=10**6)

    sp = add("decompose", _cmd_decompose, "shear/Fourier decomposition of a Gaussian gate")
    sp.add_argument("--gate", choices=["squeeze", "rotation", "beamsplitter"], required=True)
    sp.add_argument("--param", type=float, required=True)
    sp.add_argument("--form", choices=list(symplectic.BS_FORMS), default="matrix")

    sp = add("gkp", _cmd_gkp, "binomial GKP synthesis summary")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--eta", type=float, required=True)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--curve", help="write wavefunction samples to this CSV")
    sp.add_argument("--points", type=int, default=400)
    sp.add_argument("--grid", action="store_true", help="cross-check m = 1 on a two-mode grid")
    sp.add_argument("--grid-points", type=int, default=1024)

    sp = add("ft-budget", _cmd_ft_budget, "fault-tolerance budget")
    sp.add_argument("--model", choices=["universal", "cviqp"], default="universal")
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--y", type=float, required=True)
    sp.add_argument("--eps-th", type=float, default=1e-6)
    sp.add_argument("--eps-q", type=float, default=0.0)
    sp.add_argument("--eps-p", type=float, default=0.0)
    sp.add_argument("--convention", choices=list(ftcalc.CONVENTIONS), default="literal")

    sp = add("tables", _cmd_tables, "CSV tables: " + ", ".join(TABLE_NAMES))
    sp.add_argument("--name", required=True)
    sp.add_argument("--y", type=float, default=0.1)
    sp.add_argument("--p-rounding", choices=["ceil", "floor"], default="ceil")

    sp = add("curves", _cmd_curves, "CSV curves: " + ", ".join(CURVE_NAMES))
    sp.add_argument("--name", required=True)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--points", type=int, default=200)

    sp = add("sample", _cmd_sample, "draw and sample a random circuit")
    sp.add_argument("--model", choices=["random_cv", "cviqp"], required=True)
    sp.add_argument("--modes", type=int, default=1)
    sp.add_argument("--depth", type=int, default=1)
    sp.add_argument("--K", type=int, default=8)
    sp.add_argument("--k-max", type=int)
    sp.add_argument("--shots", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--m", type=int)
    sp.add_argument("--y", type=float)
    sp.add_argument("--sigma-in", type=float, default=0.5)

    sp = add("verify", _cmd_verify, "run the oracle checks")
    sp.add_argument("--quick", action="store_true", help="skip the grid simulation")
    return ap


def _apply_config(ap: argparse.ArgumentParser, path: str, command: str) -> None:
    text = Path(path).read_text()
    cp = configparser.ConfigParser(interpolation=None)
    cp.read_string("[__all__]\n" + text)
    values = dict(cp["__all__"])
    if cp.has_section(command):
        values.update(cp[command])
    sub = next(a for a in ap._actions if isinstance(a, argparse._SubParsersAction)).choices[command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in values.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise CVError(f"unknown config key {key!r} for {command}")
        action = known[dest]
        defaults[dest] = _bool(raw) if isinstance(action, argparse._StoreTrueAction) else raw
        action.required = False
    sub.set_defaults(**defaults)


def run(argv: list[str] | None = None, stdout=None) -> int:
    """Run one command; returns the exit code."""
    stdout = stdout or sys.stdout
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    try:
        if known.config:
            cmd = next((a for a in rest if not a.startswith("-")), None)
            if cmd in ap._subparsers._group_actions[0].choices:
                _apply_config(ap, known.config, cmd)
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    except (CVError, OSError) as e:
        print(f"cvsynth: error: {e}", file=sys.stderr)
        return 2
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "config", "command")}
    rep = Report(args.command, inputs)
    t0 = time.perf_counter()
    try:
        result = args.func(args, rep)
    except (CVError, ValueError) as e:
        print(f"cvsynth: error: {e}", file=sys.stderr)
        return 2
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    if isinstance(result, str):
        text, code = result, 0
    else:
        text, code = json.dumps(_jsonable(rep.to_json()), indent=2) + "\n", result
    if args.out and args.command != "sample":
        Path(args.out).write_text(text, newline="")
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
