"""Command-line front end.

Subcommands write CSV/JSON under the output directory (``--output-dir``,
then ``$SOILTIP_OUTPUT_DIR``, then ``output_dir`` from ``--config``, then the
working directory) and print one summary line. Exit status: 0 on success,
2 on usage or configuration errors, 3 on numerical failure.

Output files:

* simulate     ``simulate_<name>.csv`` (t,T,C[,s],Ta) and ``simulate_<name>.json``
* frozen-canard ``frozen_canard.json``
* manifold     ``manifold.csv`` (Ta or s, T, C, branch_label, stability)
* folded       ``folded.csv`` (Ta_plus, r, T, s, kind, eig1, eig2)
* singular-diagram ``singular_diagram.csv`` (Ta_plus, curve_id, r)
* diagram      ``diagram_<forcing>.csv`` (amplitude, r, class)
* layer-rate   ``layer_rate.json``
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from pydantic import ValidationError

from . import service, tipping
from .config import ConfigError, RunConfig, load_config, parse_grid
from .desing import NotFoundError, write_folded_csv, write_singular_diagram_csv
from .geometry import DegeneracyError, RangeError, write_manifold_csv
from .integrator import BracketError, NumericalError, write_trajectory_csv
from .soil_model import ParamError, params_to_text

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value run configuration file")
    common.add_argument("--output-dir", help="directory for CSV/JSON outputs")
    common.add_argument("--rel-tol", type=float)
    common.add_argument("--abs-tol", type=float)

    ap = argparse.ArgumentParser(prog="soiltip", description="Soil-carbon rate-induced tipping lab.")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", parents=[common], help="scenario run or compactified unstable manifold")
    sim.add_argument("--scenario", choices=tipping.SCENARIOS)
    sim.add_argument("--forcing", choices=sorted(service.FAMILIES), help="canonical input for a W^u run")
    sim.add_argument("--amp", type=float, help="Ta_plus (tanh) or Ta_max (sech)")
    sim.add_argument("--rate", type=float)
    sim.add_argument("--tstar-fig4", type=float, default=35.0)
    sim.add_argument("--fig4-start", type=float, default=tipping.FIG4_START)

    fc = sub.add_parser("frozen-canard", parents=[common], help="C(0) boundary between canards with and without head")
    fc.add_argument("--Ta", type=float, default=0.0)
    fc.add_argument("--T0", type=float, default=0.0)
    fc.add_argument("--tol", type=float, default=1e-10)
    fc.add_argument("--bracket", default="53:55.5")

    mf = sub.add_parser("manifold", parents=[common], help="critical manifold samples")
    mf.add_argument("--Ta", type=float, default=0.0)
    mf.add_argument("--Ta-max", type=float, help="sample the pulse branches over s instead")
    mf.add_argument("--n", type=int, default=2001)

    fo = sub.add_parser("folded", parents=[common], help="folded singularities of the reduced flow")
    fo.add_argument("--r", type=float, required=True)
    fo.add_argument("--Ta-plus", type=float, required=True)

    sd = sub.add_parser("singular-diagram", parents=[common], help="eps = 0 R-tipping diagram curves")
    sd.add_argument("--amp", default="0.5:6:23", help="Ta_plus grid lo:hi:n")
    sd.add_argument("--tol", type=float, default=1e-6)

    dg = sub.add_parser("diagram", parents=[common], help="eps > 0 R-tipping diagram")
    dg.add_argument("--forcing", choices=sorted(service.FAMILIES), required=True)
    dg.add_argument("--amp", required=True, help="amplitude grid lo:hi:n")
    dg.add_argument("--rate", required=True, help="rate grid lo:hi:n or log:lo:hi:n")
    dg.add_argument("--jobs", type=int, default=1)

    lr = sub.add_parser("layer-rate", parents=[common], help="fast heatwave critical rate")
    lr.add_argument("--Ta-max", type=float, default=15.0)
    lr.add_argument("--tol", type=float, default=1e-8)
    lr.add_argument("--bracket", default="1:100")
    return ap


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise ConfigError(f"bracket {text!r} must look like lo:hi") from None
    if not b > a:
        raise ConfigError(f"bracket {text!r} needs hi > lo")
    return a, b


def _tolerances(args, cfg: RunConfig) -> service.ToleranceModel:
    tol = {k: v for k, v in cfg.tolerances.items() if k in ("rel_tol", "abs_tol")}
    if args.rel_tol is not None:
        tol["rel_tol"] = args.rel_tol
    if args.abs_tol is not None:
        tol["abs_tol"] = args.abs_tol
    return service.ToleranceModel(**tol)


def _params(cfg: RunConfig) -> service.ParamsModel:
    values = {}
    for line in params_to_text(cfg.params).splitlines():
        k, v = line.split("=", 1)
        values[k] = v if k == "respiration_kind" else float(v)
    return service.ParamsModel(values=values)


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_simulate(args, cfg, out) -> str:
    params = _params(cfg)
    if args.scenario:
        req = service.SimulateRequest(scenario=args.scenario, params=params, tstar_fig4=args.tstar_fig4, fig4_start=args.fig4_start)
        resp, res = service.handle_simulate(req)
        write_trajectory_csv(res.trajectory, os.path.join(out, f"simulate_{args.scenario}.csv"))
        _write_json(os.path.join(out, f"simulate_{args.scenario}.json"), resp.summary)
        s = res.summary
        onset = "none" if s.onset_year is None else f"{s.onset_year:.3f}"
        return f"simulate {args.scenario}: onset={onset} duration={s.duration_years:.2f}y peak_T={s.peak_T:.2f}"
    if args.forcing:
        if args.amp is None or args.rate is None:
            raise ConfigError("--forcing needs --amp and --rate")
        kind = service.FAMILIES[args.forcing]
        amp_key = "ta_max" if args.forcing == "sech" else "ta_plus"
        f = cfg.build_forcing(forcing_kind=kind.value, r=args.rate, **{amp_key: args.amp})
    else:
        f = cfg.build_forcing()
    p = cfg.params
    traj = tipping.unstable_manifold(f, None, p, _tolerances(args, cfg).build(dense=True))
    if traj.termination == "blow-up":
        raise NumericalError("unstable manifold run exceeded the state limits")
    det = tipping.classify_detail(traj, f, p)
    name = f"{f.kind.value}_{f.amplitude:g}_{f.r:g}"
    write_trajectory_csv(traj, os.path.join(out, f"simulate_{name}.csv"))
    _write_json(
        os.path.join(out, f"simulate_{name}.json"),
        {"class": det.cls.name, "s2_residence": det.s2_residence, "first_s3_time": det.first_s3_time, "max_T": det.max_T},
    )
    return f"simulate {name}: {det.cls.name} (S2 residence {det.s2_residence:.4g})"


def cmd_frozen_canard(args, cfg, out) -> str:
    lo, hi = _pair(args.bracket)
    req = service.FrozenCanardRequest(Ta=args.Ta, T0=args.T0, tol=args.tol, c_lo=lo, c_hi=hi, params=_params(cfg), tolerances=_tolerances(args, cfg))
    resp = service.handle_frozen_canard(req)
    _write_json(os.path.join(out, "frozen_canard.json"), resp.model_dump())
    return f"frozen-canard Ta={args.Ta:g}: C(0) in [{resp.c_lo:.17g}, {resp.c_hi:.17g}]"


def cmd_manifold(args, cfg, out) -> str:
    req = service.ManifoldRequest(Ta=args.Ta, Ta_max=args.Ta_max, n=args.n, params=_params(cfg))
    resp = service.handle_manifold(req)
    write_manifold_csv(os.path.join(out, "manifold.csv"), resp.axis, resp.rows)
    return f"manifold: {len(resp.rows)} samples along {resp.axis}, folds at " + ", ".join(f"{x:.6g}" for x in resp.folds)


def cmd_folded(args, cfg, out) -> str:
    req = service.FoldedRequest(r=args.r, Ta_plus=args.Ta_plus, params=_params(cfg))
    resp, items = service.handle_folded(req)
    write_folded_csv(os.path.join(out, "folded.csv"), items)
    kinds = ", ".join(f"{i.kind}@s={i.s:.6g}" for i in resp.items) or "none"
    return f"folded Ta_plus={args.Ta_plus:g} r={args.r:g}: {kinds}"


def cmd_singular_diagram(args, cfg, out) -> str:
    req = service.SingularDiagramRequest(Ta_plus=parse_grid(args.amp).tolist(), tol=args.tol, params=_params(cfg))
    resp, d = service.handle_singular_diagram(req)
    write_singular_diagram_csv(os.path.join(out, "singular_diagram.csv"), d)
    deg = "none" if resp.degenerate is None else f"({resp.degenerate[0]:.5g}, {resp.degenerate[1]:.5g})"
    return f"singular-diagram: {len(resp.rows)} points, degenerate {deg}, {len(resp.failures)} failures"


def cmd_diagram(args, cfg, out) -> str:
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    req = service.DiagramRequest(
        forcing=args.forcing,
        amplitudes=parse_grid(args.amp).tolist(),
        rates=parse_grid(args.rate).tolist(),
        jobs=args.jobs,
        params=_params(cfg),
        tolerances=_tolerances(args, cfg),
    )
    resp, d = service.handle_diagram(req)
    d.to_csv(os.path.join(out, f"diagram_{args.forcing}.csv"))
    counts = [sum(row.count(c) for row in resp.classes) for c in (0, 1, 2)]
    return (
        f"diagram {args.forcing}: tracking={counts[0]} critical={counts[1]} rtipping={counts[2]} "
        f"failed={len(resp.failures)} isolated_clusters={len(resp.isolated_clusters)}"
    )


def cmd_layer_rate(args, cfg, out) -> str:
    lo, hi = _pair(args.bracket)
    req = service.LayerRateRequest(Ta_max=args.Ta_max, tol=args.tol, r_lo=lo, r_hi=hi, params=_params(cfg))
    resp = service.handle_layer_rate(req)
    _write_json(os.path.join(out, "layer_rate.json"), resp.model_dump())
    return f"layer-rate Ta_max={args.Ta_max:g}: r_c={resp.r_c:.10g}"


COMMANDS = {
    "simulate": cmd_simulate,
    "frozen-canard": cmd_frozen_canard,
    "manifold": cmd_manifold,
    "folded": cmd_folded,
    "singular-diagram": cmd_singular_diagram,
    "diagram": cmd_diagram,
    "layer-rate": cmd_layer_rate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        out = cfg.resolve_output_dir(args.output_dir)
        os.makedirs(out, exist_ok=True)
        if args.command == "simulate" and not args.scenario and not args.forcing and not cfg.forcing:
            raise ConfigError("simulate needs --scenario, --forcing or a forcing in --config")
        line = COMMANDS[args.command](args, cfg, out)
    except (NumericalError, BracketError, NotFoundError, DegeneracyError, RangeError, ArithmeticError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ParamError, ValidationError, ValueError, OSError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    print(line)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
