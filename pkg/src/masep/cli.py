"""Command-line interface: construction, verification, solving, simulation.

Every command emits one JSON envelope {tool_version, command, config,
reports} to stdout or --out. Rationals cross this boundary as "p/q" strings
only; decimals are rejected to keep the exactness contract visible.

A key = value file passed with --config supplies defaults for any flag
(keys are the long flag names with dashes replaced by underscores); flags
given on the command line override the file.

Exit codes: 0 when every requested check passed, 1 when some check failed
(the witness is in the report), 2 for invalid input or configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .boundary import (
    BoundarySpec,
    Side,
    Variant,
    boundary_from_rules,
    build_boundary,
    classify,
    decompose_boundary,
    enumerate_specs,
    transition_rates,
)
from .bulk import BulkParams
from .errors import MasepError
from .gillespie import SimConfig, SimReport, active_kernel_name, compare_empirical, simulate
from .linalg import format_rat, parse_rat
from .markov import LatticeModel, is_irreducible, stationary_distribution
from .verify import (
    check_boundary_algebra,
    check_cyclotomic_map,
    check_hecke,
    check_k_unitarity,
    check_lemma_relations,
    check_poly_relations,
    check_r_unitarity,
    check_reflection,
    check_transfer_commutation,
    check_ybe,
)

CHECK_NAMES = (
    "ybe",
    "runitarity",
    "reflection",
    "kunitarity",
    "hecke",
    "algebra",
    "lemma",
    "poly",
    "cyclotomic",
    "transfer",
)

# flags each command must end up with after merging --config defaults
_REQUIRED = {
    ("check", "ybe"): ("n", "q"),
    ("check", "runitarity"): ("n", "q"),
    ("check", "hecke"): ("n", "q"),
    ("check", "reflection"): ("n", "q", "spec"),
    ("check", "kunitarity"): ("n", "q", "spec"),
    ("check", "algebra"): ("n", "q", "spec"),
    ("check", "lemma"): ("n", "q", "spec"),
    ("check", "poly"): ("n", "q", "spec"),
    ("check", "cyclotomic"): ("n", "q", "spec"),
    ("check", "transfer"): ("n", "q", "l", "left", "right"),
    ("boundaries", "enumerate"): ("n",),
    ("boundaries", "show"): ("n", "spec"),
    ("stationary", None): ("n", "l", "left", "right"),
    ("irreducible", None): ("n", "l", "left", "right"),
    ("simulate", None): ("n", "l", "left", "right"),
    ("compare", None): ("report",),
}


def _parse_labels(text: str):
    """Parse "s1,s2,f2,f1[,variant]"."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (4, 5):
        raise ValueError(f"spec needs s1,s2,f2,f1[,variant], got {text!r}")
    labels = tuple(int(p) for p in parts[:4])
    variant = Variant(parts[4].lower()) if len(parts) == 5 else Variant.INERT
    return labels, variant


def _parse_boundary(text: str, side: Side, n: int) -> BoundarySpec:
    """Parse "s1,s2,f2,f1[,variant][:a=p/q,c=p/q]" into a spec."""
    rates = {"a": Fraction(1), "c": Fraction(1)}
    if ":" in text:
        text, rate_part = text.split(":", 1)
        for item in rate_part.split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if key not in rates or not sep or not value:
                raise ValueError(f"bad rate assignment {item!r} (want a=p/q,c=p/q)")
            rates[key] = parse_rat(value)
    labels, variant = _parse_labels(text)
    return BoundarySpec(
        side=side,
        rate_a=rates["a"],
        rate_c=rates["c"],
        s1=labels[0],
        s2=labels[1],
        f2=labels[2],
        f1=labels[3],
        variant=variant,
        n_species_total=n,
    )


def _load_config_defaults(argv):
    """Pre-scan for --config and return {dest: parsed value} defaults."""
    path = None
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif arg.startswith("--config="):
            path = arg.split("=", 1)[1]
    if path is None:
        return {}
    defaults = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"config line is not key = value: {line!r}")
            value = value.strip()
            try:
                parsed = int(value)
            except ValueError:
                parsed = value
            defaults[key.strip().replace("-", "_")] = parsed
    return defaults


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="masep",
        description="exact integrable boundaries for the multi-species ASEP",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, model=False, spec=False, sampled=False):
        p.add_argument("--n", type=int, help="total species count (holes = species 1)")
        p.add_argument("--q", type=str, help="asymmetry as a p/q string")
        if model:
            p.add_argument("--l", type=int, help="number of sites")
            p.add_argument("--left", type=str,
                           help="left spec s1,s2,f2,f1[,variant][:a=p/q,c=p/q]")
            p.add_argument("--right", type=str, help="right spec, same syntax")
        if spec:
            p.add_argument("--spec", type=str, help="boundary labels s1,s2,f2,f1[,variant]")
            p.add_argument("--a", type=str, default="1", help="rate a (alpha/beta)")
            p.add_argument("--c", type=str, default="1", help="rate c (gamma/delta)")
            p.add_argument("--side", choices=["left", "right"], default="left")
        if sampled:
            p.add_argument("--samples", type=int, default=5)
            p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=str, default=None, help="write the JSON report here")
        p.add_argument("--config", type=str, default=None,
                       help="key = value file mirroring the flags; flags override")

    check = sub.add_parser("check", help="verify one algebraic identity")
    csub = check.add_subparsers(dest="check_name", required=True)
    for name in ("ybe", "runitarity"):
        add_common(csub.add_parser(name), sampled=True)
    add_common(csub.add_parser("hecke"))
    for name in ("reflection", "kunitarity"):
        add_common(csub.add_parser(name), spec=True, sampled=True)
    for name in ("algebra", "poly", "cyclotomic"):
        add_common(csub.add_parser(name), spec=True)
    p = csub.add_parser("lemma")
    add_common(p, spec=True)
    p.add_argument("--k-max", type=int, default=4, dest="k_max")
    p = csub.add_parser("transfer")
    add_common(p, model=True, sampled=True)
    p.add_argument("--dimension-cap", type=int, default=256, dest="dimension_cap")

    bnd = sub.add_parser("boundaries", help="enumerate or display the boundary family")
    bsub = bnd.add_subparsers(dest="boundaries_command", required=True)
    p = bsub.add_parser("enumerate")
    p.add_argument("--n", type=int)
    p.add_argument("--side", choices=["left", "right"], default="left")
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--config", type=str, default=None)
    add_common(bsub.add_parser("show"), spec=True)

    add_common(sub.add_parser("stationary", help="exact stationary distribution"), model=True)
    add_common(sub.add_parser("irreducible", help="strong connectivity of the model"), model=True)

    p = sub.add_parser("simulate", help="continuous-time Monte Carlo run")
    add_common(p, model=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--events", type=int, default=1_000_000)
    p.add_argument("--burn-in", type=int, default=0, dest="burn_in")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--kernel", choices=["compiled", "python"], default=None)
    p.add_argument("--csv", type=str, default=None,
                   help="also write site densities and currents as CSV")

    p = sub.add_parser("compare", help="divergence of a saved run vs the exact kernel")
    p.add_argument("--report", type=str, help="JSON file produced by masep simulate")
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--config", type=str, default=None)
    return parser


def _q_of(args) -> Fraction:
    return parse_rat(args.q) if args.q is not None else Fraction(1)


def _spec_of(args) -> BoundarySpec:
    labels, variant = _parse_labels(args.spec)
    return BoundarySpec(
        side=Side(args.side),
        rate_a=parse_rat(args.a),
        rate_c=parse_rat(args.c),
        s1=labels[0],
        s2=labels[1],
        f2=labels[2],
        f1=labels[3],
        variant=variant,
        n_species_total=args.n,
    )


def _model_of(args) -> LatticeModel:
    return LatticeModel(
        n_species_total=args.n,
        sites=args.l,
        q=_q_of(args),
        left=_parse_boundary(args.left, Side.LEFT, args.n),
        right=_parse_boundary(args.right, Side.RIGHT, args.n),
    )


def _spec_warnings(specs, q) -> list:
    notes = []
    for spec in specs:
        if spec.degenerate_for(q):
            notes.append(
                f"spec {spec.labels} side={spec.side.value}: a + c + q - 1 = 0, "
                "dressed rates vanish (degenerate but admissible)"
            )
    return notes


def _run_check(args):
    name = args.check_name
    q = _q_of(args)
    warnings: list = []
    if name in ("ybe", "runitarity", "hecke"):
        p = BulkParams(args.n, q)
        if name == "ybe":
            report = check_ybe(p, args.samples, args.seed)
        elif name == "runitarity":
            report = check_r_unitarity(p, args.samples, args.seed)
        else:
            report = check_hecke(p)
    elif name == "transfer":
        model = _model_of(args)
        warnings = _spec_warnings((model.left, model.right), q)
        report = check_transfer_commutation(
            model, args.samples, args.seed, dimension_cap=args.dimension_cap
        )
    else:
        spec = _spec_of(args)
        warnings = _spec_warnings((spec,), q)
        if name == "reflection":
            report = check_reflection(spec, q, args.samples, args.seed)
        elif name == "kunitarity":
            report = check_k_unitarity(spec, q, args.samples, args.seed)
        elif name == "algebra":
            report = check_boundary_algebra(spec, q)
        elif name == "lemma":
            report = check_lemma_relations(spec, q, args.k_max)
        elif name == "poly":
            report = check_poly_relations(spec, q)
        else:
            report = check_cyclotomic_map(spec, q)
    payload = report.to_json_dict()
    if warnings:
        payload["notes"] = payload.get("notes", []) + warnings
    return [payload], (0 if report.passed else 1)


def _matrix_rows(m):
    return [[format_rat(x) for x in m.row(i)] for i in range(m.rows)]


def _run_boundaries(args):
    if args.boundaries_command == "enumerate":
        specs = enumerate_specs(args.n, Side(args.side))
        return [{"count": len(specs), "specs": [s.to_record() for s in specs]}], 0
    spec = _spec_of(args)
    q = _q_of(args)
    b = build_boundary(spec, q)
    payload = {
        "spec": spec.to_record(),
        "q": format_rat(q),
        "matrix": _matrix_rows(b),
        "classes": {str(t): classify(spec, t).value for t in range(1, args.n + 1)},
        "rules": {
            f"{src}->{dst}": format_rat(rate)
            for (src, dst), rate in sorted(transition_rates(spec, q).items())
        },
        "rule_matrix_matches_template": boundary_from_rules(spec, q) == b,
        "notes": _spec_warnings((spec,), q),
    }
    if spec.side is Side.LEFT:
        b0, bp, bm = decompose_boundary(spec, q)
        payload["decomposition"] = {
            "b0": _matrix_rows(b0),
            "b0_plus": _matrix_rows(bp),
            "b0_minus": _matrix_rows(bm),
        }
    return [payload], 0


def _run_stationary(args):
    model = _model_of(args)
    result = stationary_distribution(model)
    payload = result.to_json_dict()
    notes = _spec_warnings((model.left, model.right), model.q)
    if notes:
        payload["notes"] = notes
    return [payload], 0


def _run_irreducible(args):
    model = _model_of(args)
    return [{"irreducible": is_irreducible(model)}], 0


def _run_simulate(args):
    model = _model_of(args)
    cfg = SimConfig(
        seed=args.seed,
        total_events=args.events,
        burn_in_events=args.burn_in,
        record_stride=args.stride,
    )
    report = simulate(model, cfg, replicas=args.replicas, kernel=args.kernel)
    if args.csv:
        _write_csv(args.csv, report)
    return [report.to_json_dict()], 0


def _write_csv(path: str, report):
    n = report.model["N"]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("kind,site,species,value\n")
        for site, row in enumerate(report.site_densities, start=1):
            for species, value in enumerate(row, start=1):
                fh.write(f"density,{site},{species},{value!r}\n")
        for side in ("left", "right"):
            for species in range(1, n + 1):
                value = report.boundary_currents[side][species - 1]
                fh.write(f"current_{side},,{species},{value!r}\n")


def _run_compare(args):
    with open(args.report, encoding="utf-8") as fh:
        envelope = json.load(fh)
    sim_dicts = envelope["reports"] if "reports" in envelope else [envelope]
    out = []
    for sd in sim_dicts:
        sim = SimReport(**sd)
        model = LatticeModel(
            n_species_total=sim.model["N"],
            sites=sim.model["L"],
            q=parse_rat(sim.model["q"]),
            left=BoundarySpec.from_record(sim.model["left"]),
            right=BoundarySpec.from_record(sim.model["right"]),
        )
        exact = stationary_distribution(model)
        out.append(compare_empirical(sim, exact).to_json_dict())
    return out, 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        defaults = _load_config_defaults(argv)
    except (OSError, ValueError) as exc:
        print(f"masep: bad config file: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for key, value in defaults.items():
        if hasattr(args, key) and not _flag_given(argv, key):
            setattr(args, key, value)
    missing = [
        flag
        for flag in _REQUIRED.get(
            (args.command, getattr(args, "check_name", None) or getattr(args, "boundaries_command", None)),
            (),
        )
        if getattr(args, flag, None) is None
    ]
    if missing:
        print(
            f"masep {_command_path(args)}: missing required option(s): "
            + ", ".join("--" + m.replace("_", "-") for m in missing),
            file=sys.stderr,
        )
        return 2

    runners = {
        "check": _run_check,
        "boundaries": _run_boundaries,
        "stationary": _run_stationary,
        "irreducible": _run_irreducible,
        "simulate": _run_simulate,
        "compare": _run_compare,
    }
    try:
        reports, code = runners[args.command](args)
    except (MasepError, ValueError, OSError) as exc:
        print(f"masep: {exc}", file=sys.stderr)
        return 2
    except (KeyError, TypeError) as exc:
        print(f"masep: malformed input file or options: {exc}", file=sys.stderr)
        return 2
    envelope = {
        "tool_version": __version__,
        "command": _command_path(args),
        "config": _config_echo(args),
        "reports": reports,
    }
    text = json.dumps(envelope, indent=2, sort_keys=True) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def _flag_given(argv, dest: str) -> bool:
    opt = "--" + dest.replace("_", "-")
    return any(arg == opt or arg.startswith(opt + "=") for arg in argv)


def _command_path(args) -> str:
    parts = [args.command]
    for attr in ("check_name", "boundaries_command"):
        if getattr(args, attr, None):
            parts.append(getattr(args, attr))
    return " ".join(parts)


def _config_echo(args) -> dict:
    skip = {"command", "check_name", "boundaries_command", "out", "config"}
    echo = {}
    for key, value in sorted(vars(args).items()):
        if key not in skip and value is not None:
            echo[key] = value
    echo["kernel_selected"] = active_kernel_name()
    echo["threads_cap"] = os.environ.get("MASEP_THREADS")
    return echo


if __name__ == "__main__":
    raise SystemExit(main())
