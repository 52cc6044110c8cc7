"""Command line interface.

Subcommands expose the main library entry points: block spectra, state
ranks, abelian subset-sum statistics, Helstrom discrimination, weak
sampling, variance bounds for single-register measurements, random-POVM
indistinguishability sweeps, graph-based oracle instances, and a self-check
battery. Output is CSV (with a single comment line carrying the tool
version and the run configuration) or JSON; both are deterministic for a
fixed configuration and contain no timestamps.

Exit codes: 0 success, 2 invalid input, 3 capacity limit, 4 internal
consistency failure. Errors are reported as a JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import CapacityError, ConsistencyError, DomainError
from .groups import (
    Group,
    abelian_group,
    abelian_subgroup_of_abelian,
    abelian_subgroup_of_symmetric,
    parse_group,
    symmetric_group,
)
from .irreps import fourier, irreps, plancherel
from .measurements import (
    helstrom,
    indistinguishability_sweep,
    random_povm,
    single_register_distributions,
    tv_distance,
    variance_bound_rows,
    weak_sampling_distribution,
    weighted_variance_sum,
)
from .states import (
    averaged_shift_state_dense,
    block_shift_state,
    dense_from_blocks,
    interior_eigenvalue_check,
    maximally_mixed_state,
    rank_closed_form,
    shift_state_dense,
    spectrum_rows,
    state_rank,
    subgroup_restriction_check,
    to_block_basis,
)
from .subset_sums import moments, subset_sum_table, success_from_rank, success_probability
from . import iso as iso_mod

VERSION = "0.1.0"


# ---------------------------------------------------------------------------
# serialization helpers


def _fraction_text(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return _fraction_text(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Fraction):
        return _fraction_text(value)
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".15g")
    return str(value)


def _write_csv(stream, rows: list[dict], config: dict) -> None:
    stream.write(f"# hslab {VERSION} {json.dumps(_jsonable(config), sort_keys=True)}\n")
    if not rows:
        return
    columns = list(rows[0].keys())
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])


def _write_json(stream, payload: dict) -> None:
    json.dump(_jsonable(payload), stream, indent=2, sort_keys=True)
    stream.write("\n")


def _emit(args, rows: list[dict], config: dict, extra: dict | None = None) -> None:
    payload = {"version": VERSION, "config": config, "rows": rows}
    if extra:
        payload.update(extra)

    def write(stream):
        if args.format == "csv":
            _write_csv(stream, rows, config)
        else:
            _write_json(stream, payload)

    if args.out:
        with open(args.out, "w", newline="") as fh:
            write(fh)
    else:
        write(sys.stdout)


def _resolve_cache_dir(args) -> str | None:
    if getattr(args, "cache_dir", None):
        return args.cache_dir
    env = os.environ.get("HSLAB_CACHE")
    if env:
        return env
    return str(Path.home() / ".cache" / "hslab")


def _load_group(args) -> Group:
    group = parse_group(args.group)
    irreps(group, cache_dir=_resolve_cache_dir(args))
    return group


def _check_shift(group: Group, shift: int | None) -> int | None:
    if shift is None:
        return None
    group.check_index(shift)
    return shift


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_spectrum(args) -> int:
    group = _load_group(args)
    shift = _check_shift(group, args.shift)
    rows = spectrum_rows(group, args.k, shift, threads=args.threads)
    config = {
        "command": "spectrum",
        "group": group.descriptor,
        "k": args.k,
        "shift": shift,
        "eigenvalue_scale": "block",
        "state_scale_factor": f"(2*{group.order})^-{args.k}",
    }
    _emit(args, rows, config)
    return 0


def _cmd_rank(args) -> int:
    group = _load_group(args)
    shift = _check_shift(group, args.shift)
    rank = state_rank(group, args.k, shift, threads=args.threads)
    if shift is None:
        closed = rank_closed_form(group, args.k) if args.k <= 2 else None
    else:
        closed = group.order ** args.k
    row = {
        "group": group.descriptor,
        "k": args.k,
        "variant": "averaged" if shift is None else "fixed",
        "shift": shift,
        "dimension": (2 * group.order) ** args.k,
        "rank": rank,
        "closed_form": closed,
        "agrees": None if closed is None else rank == closed,
    }
    if closed is not None and rank != closed:
        raise ConsistencyError(
            f"numeric rank {rank} disagrees with the closed form {closed}"
        )
    config = {"command": "rank", "group": group.descriptor, "k": args.k, "shift": shift}
    _emit(args, [row], config)
    return 0


def _cmd_subset_sum(args) -> int:
    group = _load_group(args)
    report = moments(group, args.k, method=args.method)
    if not report.agree():
        raise ConsistencyError("counted moments disagree with the closed forms")
    try:
        table = subset_sum_table(group, args.k)
        rank = table.rank()
        success = success_from_rank(rank, group.order, args.k)
    except CapacityError:
        rank = None
        success = None
    bound = Fraction(1, 2) * (1 + Fraction(group.order, 2 ** args.k))
    row = {
        "group": group.descriptor,
        "k": args.k,
        "rank": rank,
        "mean": report.mean_formula,
        "second_moment": report.second_formula,
        "variance": report.variance,
        "success": success,
        "success_float": None if success is None else float(success),
        "bound": bound,
        "bound_float": float(bound),
        "method": report.method,
    }
    config = {
        "command": "subset-sum",
        "group": group.descriptor,
        "k": args.k,
        "method": args.method,
    }
    _emit(args, [row], config)
    return 0


def _cmd_helstrom(args) -> int:
    group = _load_group(args)
    shift = _check_shift(group, args.shift)
    shift2 = _check_shift(group, args.shift2)
    if shift is None and shift2 is not None:
        raise DomainError("--shift2 requires --shift")
    if shift is None:
        first = averaged_shift_state_dense(group, args.k)
        first_name = "averaged"
    else:
        first = shift_state_dense(group, shift, args.k)
        first_name = f"shift {shift}"
    if shift2 is None:
        second = maximally_mixed_state(group, args.k, form="dense")
        second_name = "mixed"
    else:
        second = shift_state_dense(group, shift2, args.k)
        second_name = f"shift {shift2}"
    result = helstrom(first.dense, second.dense)
    derived = 0.5 + 0.25 * result.trace_norm
    if abs(result.success - derived) > 1e-10:
        raise ConsistencyError(
            "optimal success probability deviates from the trace-norm formula"
        )
    row = {
        "group": group.descriptor,
        "k": args.k,
        "first": first_name,
        "second": second_name,
        "success": result.success,
        "trace_norm": result.trace_norm,
    }
    config = {
        "command": "helstrom",
        "group": group.descriptor,
        "k": args.k,
        "shift": shift,
        "shift2": shift2,
    }
    _emit(args, [row], config)
    return 0


def _cmd_weak_sample(args) -> int:
    group = _load_group(args)
    shift = _check_shift(group, args.shift)
    state = block_shift_state(group, 1, shift)
    dist = weak_sampling_distribution(state)
    reference = plancherel(group)
    rows = []
    for rep in irreps(group):
        prob = dist[rep.label]
        ref = reference[rep.label]
        rows.append(
            {
                "group": group.descriptor,
                "variant": "averaged" if shift is None else f"shift {shift}",
                "irrep_label": rep.name,
                "d_rho": rep.dim,
                "probability": prob,
                "plancherel": ref,
                "deviation": abs(prob - float(ref)),
            }
        )
    config = {"command": "weak-sample", "group": group.descriptor, "shift": shift}
    _emit(args, rows, config)
    return 0


def _cmd_variance_bound(args) -> int:
    group = _load_group(args)
    rows = variance_bound_rows(group, args.trials, args.seed, args.outcomes)
    config = {
        "command": "variance-bound",
        "group": group.descriptor,
        "trials": args.trials,
        "seed": args.seed,
        "outcomes": args.outcomes,
    }
    _emit(args, rows, config)
    return 0


def _cmd_sweep(args) -> int:
    group = _load_group(args)
    report = indistinguishability_sweep(group, args.trials, args.seed, args.outcomes)
    config = {
        "command": "sweep",
        "group": group.descriptor,
        "trials": args.trials,
        "seed": args.seed,
        "outcomes": args.outcomes,
    }
    _emit(args, report.rows(), config, extra={"summary": report.summary()})
    return 0


def _cmd_iso(args) -> int:
    if args.inline:
        first_text = args.first.replace(";", "\n")
        second_text = args.second.replace(";", "\n")
    else:
        try:
            first_text = Path(args.first).read_text()
            second_text = Path(args.second).read_text()
        except OSError as exc:
            raise DomainError(f"cannot read graph file: {exc}") from exc
    A = iso_mod.parse_graph_text(first_text)
    B = iso_mod.parse_graph_text(second_text)
    pair = iso_mod.make_shift_oracles(A, B)
    G = pair.group
    shift = iso_mod.find_shift_bruteforce(pair)
    independent = iso_mod.are_isomorphic(A, B)
    if (shift is None) != (independent is None):
        raise ConsistencyError("oracle search and exhaustive search disagree")
    state = iso_mod.states_from_oracles(pair, copies=1)
    if shift is None:
        reference = maximally_mixed_state(G, 1, form="dense").dense
    else:
        reference = shift_state_dense(G, G.inverse(shift), 1).dense
    deviation = float(np.max(np.abs(state.dense - reference)))
    if deviation > 1e-12:
        raise ConsistencyError("oracle state deviates from its reference form")
    payload = {
        "isomorphic": shift is not None,
        "group": G.descriptor,
        "shift_index": shift,
        "shift_name": None if shift is None else G.element_name(shift),
        "state_dimension": state.dimension,
        "state_reference": "mixed" if shift is None else "averaged base point, inverse shift",
        "state_max_abs_deviation": deviation,
    }
    config = {"command": "iso", "first": args.first, "second": args.second}
    if args.out:
        with open(args.out, "w", newline="") as fh:
            _write_json(fh, {"version": VERSION, "config": config, **payload})
    else:
        _write_json(sys.stdout, {"version": VERSION, "config": config, **payload})
    return 0


# ---------------------------------------------------------------------------
# verify-all battery


def _ok(message: str) -> None:
    print(f"ok: {message}")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConsistencyError(message)
    _ok(message)


def _cmd_verify_all(args) -> int:
    cache = _resolve_cache_dir(args)

    for name in ("S3", "S4", "Z2xZ4"):
        group = parse_group(name)
        irreps(group, cache_dir=cache)
        fourier(group)
        _ok(f"fourier transform of {name} is unitary and block-diagonalizes translation")

    for name, k in (("S3", 1), ("S3", 2), ("Z4", 2)):
        group = parse_group(name)
        dense = to_block_basis(averaged_shift_state_dense(group, k).dense, group, k)
        blocks = dense_from_blocks(block_shift_state(group, k))
        _require(
            float(np.max(np.abs(dense - blocks))) <= 1e-10,
            f"dense and block constructions of the averaged {name} k={k} state agree",
        )

    for name, k in (("S3", 1), ("S3", 2), ("S4", 2), ("Z4", 2), ("Z2xZ4", 2)):
        group = parse_group(name)
        _require(
            state_rank(group, k) == rank_closed_form(group, k),
            f"rank of the averaged {name} k={k} state matches the closed form",
        )

    group = parse_group("S4")
    dist = weak_sampling_distribution(block_shift_state(group, 1))
    reference = plancherel(group)
    _require(
        max(abs(dist[lab] - float(p)) for lab, p in reference.items()) <= 1e-12,
        "weak sampling of S4 reproduces the Plancherel distribution",
    )

    group = parse_group("S3")
    worst = 0.0
    for rep in irreps(group):
        if rep.is_trivial:
            continue
        povm = random_povm(2 * rep.dim, 4 * rep.dim, seed=0)
        dists = single_register_distributions(rep, povm)
        worst = max(worst, tv_distance(dists.averaged, dists.mixed).tv)
        _require(
            weighted_variance_sum(rep, povm) <= 1.0 / rep.dim ** 2 + 1e-10,
            f"weighted variance sum within 1/d^2 for S3 irrep {rep.name}",
        )
    _require(
        worst <= 1e-12,
        "averaged single-register statistics of S3 match the mixed state",
    )

    report = moments(abelian_group(8), 4, method="table")
    conv = moments(abelian_group(8), 4, method="convolution")
    _require(
        report.agree()
        and conv.agree()
        and report.mean_counted == conv.mean_counted
        and report.second_counted == conv.second_counted,
        "subset-sum moments of Z8 k=4 agree between table and convolution",
    )

    group = parse_group("S3")
    hel = helstrom(
        averaged_shift_state_dense(group, 1).dense,
        maximally_mixed_state(group, 1, form="dense").dense,
    )
    _require(
        abs(hel.success - (0.5 + 0.25 * hel.trace_norm)) <= 1e-12,
        "Helstrom success equals the trace-norm formula for S3",
    )
    Z6 = abelian_group(6)
    _require(
        abs(
            helstrom(
                averaged_shift_state_dense(Z6, 1).dense,
                maximally_mixed_state(Z6, 1, form="dense").dense,
            ).success
            - float(success_probability(Z6, 1).probability)
        )
        <= 1e-10,
        "Helstrom success for Z6 matches the subset-sum support count",
    )

    _require(
        interior_eigenvalue_check(parse_group("S4"), 2).found,
        "averaged S4 k=2 state has an eigenvalue strictly inside (0, dim^-1)",
    )
    _require(
        not interior_eigenvalue_check(parse_group("Z2"), 1).found,
        "averaged Z2 k=1 state has no eigenvalue strictly inside (0, dim^-1)",
    )

    _require(
        subgroup_restriction_check(abelian_subgroup_of_symmetric(4, (4,))),
        "states with shifts from the cyclic subgroup of S4 factor as expected",
    )
    _require(
        subgroup_restriction_check(abelian_subgroup_of_abelian(abelian_group(4), (2,))),
        "states with shifts from the index-2 subgroup of Z4 factor as expected",
    )

    A, B0 = iso_mod.rigid_corpus(6, 2)
    sigma = (1, 2, 3, 4, 5, 0)
    pair = iso_mod.make_shift_oracles(A, iso_mod.graph_act(sigma, A))
    found = iso_mod.find_shift_bruteforce(pair)
    G6 = symmetric_group(6)
    _require(
        found is not None and G6.perm(found) == sigma,
        "oracle shift recovery returns the planted relabeling on a rigid 6-vertex graph",
    )
    disjoint = iso_mod.find_shift_bruteforce(iso_mod.make_shift_oracles(A, B0))
    _require(
        disjoint is None,
        "oracle shift recovery reports non-isomorphic rigid graphs as unrelated",
    )

    print("all checks passed")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser, *, group=True, k=False) -> None:
    if group:
        p.add_argument("--group", required=True, help="group descriptor, e.g. S4 or Z2xZ4")
    if k:
        p.add_argument("--k", type=int, default=1, help="number of state copies")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--cache-dir", help="irrep matrix cache directory")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hslab",
        description="numerical laboratory for hidden-shift states and measurements",
    )
    parser.add_argument("--version", action="version", version=f"hslab {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="clustered block spectra of a state")
    _add_common(p, k=True)
    p.add_argument("--shift", type=int, help="fixed shift index (default: averaged state)")
    p.set_defaults(handler=_cmd_spectrum)

    p = sub.add_parser("rank", help="numeric rank of a state, with closed forms")
    _add_common(p, k=True)
    p.add_argument("--shift", type=int)
    p.set_defaults(handler=_cmd_rank)

    p = sub.add_parser("subset-sum", help="abelian subset-sum statistics and moments")
    _add_common(p, k=True)
    p.add_argument(
        "--method",
        choices=("auto", "table", "convolution"),
        default="auto",
        help="how to count subset sums",
    )
    p.set_defaults(handler=_cmd_subset_sum)

    p = sub.add_parser("helstrom", help="optimal discrimination of two states")
    _add_common(p, k=True)
    p.add_argument("--shift", type=int, help="first state: fixed shift (default averaged)")
    p.add_argument("--shift2", type=int, help="second state: fixed shift (default mixed)")
    p.set_defaults(handler=_cmd_helstrom)

    p = sub.add_parser("weak-sample", help="exact irrep-label distribution")
    _add_common(p)
    p.add_argument("--shift", type=int)
    p.set_defaults(handler=_cmd_weak_sample)

    p = sub.add_parser("variance-bound", help="variance bound for random measurements")
    _add_common(p)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outcomes", type=int)
    p.set_defaults(handler=_cmd_variance_bound)

    p = sub.add_parser("sweep", help="random-POVM indistinguishability sweep")
    _add_common(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outcomes", type=int)
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("iso", help="graph-pair oracle instance and shift recovery")
    p.add_argument("--first", required=True, help="graph file (or inline text with --inline)")
    p.add_argument("--second", required=True)
    p.add_argument("--inline", action="store_true", help="treat --first/--second as text, ';' splits lines")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_iso)

    p = sub.add_parser("verify-all", help="run the self-check battery")
    p.add_argument("--cache-dir")
    p.set_defaults(handler=_cmd_verify_all)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "k", 1) < 1:
            raise DomainError("k must be at least 1")
        if getattr(args, "threads", 1) < 1:
            raise DomainError("threads must be at least 1")
        return args.handler(args)
    except DomainError as exc:
        return _fail(exc, 2)
    except CapacityError as exc:
        return _fail(exc, 3)
    except ConsistencyError as exc:
        return _fail(exc, 4)


def _fail(exc: Exception, code: int) -> int:
    payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    json.dump(payload, sys.stderr)
    sys.stderr.write("\n")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
