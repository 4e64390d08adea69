"""Command-line front end: instance generation, experiment runs, scaling
studies, and poset analysis reports.

Subcommands: gen | run | scale | analyze.  Records stream as JSON lines,
scaling tables as CSV.  Everything is deterministic in (command, flags,
seed).  Exit codes: 0 on success, 2 on promise/condition violations, 1 on any
other error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import random
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import arrays, intersect, poset as poset_mod
from .abstract_search import forest_search, forest_search_multi, halving_learner
from .concrete_search import (
    classical_2d_search,
    ddim_search,
    dilworth_search_classical,
    dilworth_search_quantum,
    quantum_2d_search,
)
from .errors import (
    ConditionViolation,
    PosetSearchError,
    PromiseViolation,
    RangeError,
    SizeError,
)
from .oracles import (
    AbstractSession,
    ConcreteSession,
    QueryLedger,
    assign_random_linear_extension,
    format_instance_text,
    parse_instance_text,
)
from .poset import (
    GAMMA_MAX_N,
    DECISION_DEPTH_MAX_N,
    IDEAL_COUNT_MAX_N,
    Poset,
    antichain,
    chain,
    count_ideals,
    dilworth_decomposition,
    exact_decision_depth,
    format_poset_text,
    forest_poset,
    gamma_bruteforce,
    grid_poset,
    height,
    parse_poset_text,
    random_poset,
    width,
)
from .qsim import grover_iterations

ALGORITHMS = (
    "forest",
    "forest-multi",
    "halving",
    "dilworth-c",
    "dilworth-q",
    "array2d-c",
    "array2d-q",
    "ddim",
    "intersect-single",
    "intersect-multi",
)

GEN_FAMILIES = ("chain", "antichain", "forest", "grid", "random", "lists")


@dataclass
class RunRecord:
    """One experiment trial, losslessly serializable and replayable."""

    algorithm: str
    instance: dict
    trial: int
    seed: int
    outcome: dict
    queries: dict
    success_prob: float | None
    wall_time_s: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "RunRecord":
        return RunRecord(**json.loads(text))


def trial_seed(seed: int, trial: int) -> int:
    return seed * 1_000_003 + trial


# ---------------------------------------------------------------------------
# Instance loading and generation
# ---------------------------------------------------------------------------


def planted_lists(l: int, m: int, z: int, seed: int):
    """Two ascending lists with exactly z common values, all runs length 1."""
    if z > min(l, m):
        raise RangeError("cannot plant more matches than the shorter list")
    rng = random.Random(seed)
    universe = 4 * max(l, m, 1)
    commons = sorted(rng.sample(range(universe), z))
    only_l = sorted(rng.sample(range(universe), l - z))
    only_m = sorted(rng.sample(range(universe), m - z))
    L = sorted([3 * v for v in commons] + [3 * v + 1 for v in only_l])
    M = sorted([3 * v for v in commons] + [3 * v + 2 for v in only_m])
    return tuple(L), tuple(M)


def generate_instance(family: str, params: dict, seed: int) -> dict[str, str]:
    """Instance files (relative name -> content) for a family, fully seeded."""
    if family == "chain":
        return {"instance.poset": format_poset_text(chain(params["n"]))}
    if family == "antichain":
        return {"instance.poset": format_poset_text(antichain(params["n"]))}
    if family == "forest":
        p = forest_poset(params.get("arity", 2), params.get("levels", 3))
        return {"instance.poset": format_poset_text(p)}
    if family == "random":
        p = random_poset(params["n"], params.get("density", 0.2), seed)
        return {"instance.poset": format_poset_text(p)}
    if family == "grid":
        d, m = params.get("d", 2), params["m"]
        p = grid_poset(d, m)
        values = assign_random_linear_extension(p, seed)
        out = {
            "instance.poset": format_poset_text(p),
            "instance.values": format_instance_text(p, values),
        }
        if d == 2:
            cells = tuple(
                tuple(values[i * m + j] for j in range(m)) for i in range(m)
            )
            array = arrays.SortedArray2D(rows=m, cols=m, cells=cells)
            out["instance.csv"] = arrays.format_array_csv(array)
        return out
    if family == "lists":
        l = params["n"]
        m = params.get("m", l)
        z = params.get("planted", 1)
        L, M = planted_lists(l, m, z, seed)
        text = " ".join(map(str, L)) + "\n" + " ".join(map(str, M)) + "\n"
        return {"instance.lists": text}
    raise RangeError(f"unknown family {family!r}")


def parse_lists_text(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != 2:
        raise RangeError("lists file must hold exactly two lines")
    L = tuple(int(tok) for tok in lines[0].split())
    M = tuple(int(tok) for tok in lines[1].split())
    return L, M


def parse_ndarray_text(text: str) -> arrays.NdSortedArray:
    tokens = text.split()
    if len(tokens) < 3 or tokens[0] != "ndarray":
        raise RangeError("expected 'ndarray <d> <m>' header")
    d, m = int(tokens[1]), int(tokens[2])
    flat = tuple(int(tok) for tok in tokens[3:])
    return arrays.NdSortedArray(d=d, m=m, flat=flat)


def format_ndarray_text(nd: arrays.NdSortedArray) -> str:
    body = "\n".join(
        " ".join(str(v) for v in nd.flat[i : i + nd.m])
        for i in range(0, len(nd.flat), nd.m)
    )
    return f"ndarray {nd.d} {nd.m}\n{body}\n"


# ---------------------------------------------------------------------------
# Algorithm runners
# ---------------------------------------------------------------------------


def _abstract_target(poset: Poset, target_spec, rng: random.Random):
    if target_spec in (None, "random"):
        pick = rng.randrange(poset.n + 1)
        return frozenset() if pick == poset.n else frozenset({pick})
    if target_spec in ("none", "absent"):
        return frozenset()
    return frozenset({int(target_spec)})


def _concrete_target(values, target_spec, rng: random.Random) -> int:
    if target_spec in (None, "random"):
        return values[rng.randrange(len(values))]
    if target_spec in ("none", "absent"):
        present = set(values)
        candidate = max(values) + 1
        probe = rng.randrange(min(values), max(values) + 2)
        return probe if probe not in present else candidate
    return int(target_spec)


def run_algorithm(
    algorithm: str,
    instance: dict,
    seed: int,
    trial: int = 0,
    budget: int | None = None,
) -> RunRecord:
    """Execute one trial; the (algorithm, instance, seed, trial) tuple fully
    determines the ledger and outcome."""
    if algorithm not in ALGORITHMS:
        raise RangeError(f"unknown algorithm {algorithm!r}")
    rng = random.Random(trial_seed(seed, trial))
    ledger = QueryLedger(budget=budget)
    target_spec = instance.get("target")
    started = time.perf_counter()
    outcome: dict = {}
    success_prob: float | None = None

    kind = instance["kind"]
    if algorithm in ("forest", "forest-multi", "halving"):
        if kind != "poset":
            raise RangeError(f"{algorithm} needs a poset instance, got {kind}")
        p = parse_poset_text(instance["text"])
        marked = _abstract_target(p, target_spec, rng)
        if algorithm == "halving" and len(marked) != 1:
            marked = frozenset({rng.randrange(p.n)})
        session = AbstractSession(p, marked, ledger)
        if algorithm == "forest":
            element, _trace = forest_search(p, session)
            success_prob = 1.0
        elif algorithm == "forest-multi":
            element, _trace = forest_search_multi(p, session, seed=rng.getrandbits(32))
        else:
            element = halving_learner(p, session)
        outcome = {
            "found": element is not None,
            "element": element,
            "marked": sorted(marked),
        }
    elif algorithm in ("dilworth-c", "dilworth-q"):
        if kind != "values":
            raise RangeError(f"{algorithm} needs a poset+values instance, got {kind}")
        p, values = parse_instance_text(instance["text"])
        target = _concrete_target(values, target_spec, rng)
        session = ConcreteSession(p, values, target, ledger)
        if algorithm == "dilworth-c":
            element = dilworth_search_classical(session)
        else:
            element = dilworth_search_quantum(session, seed=rng.getrandbits(32))
        outcome = {"found": element is not None, "element": element, "target": target}
    elif algorithm in ("array2d-c", "array2d-q"):
        if kind != "array":
            raise RangeError(f"{algorithm} needs an array instance, got {kind}")
        array = arrays.parse_array_csv(instance["text"])
        flat = [v for row in array.cells for v in row]
        target = _concrete_target(flat, target_spec, rng)
        if algorithm == "array2d-c":
            cell, trace = classical_2d_search(array, target, ledger)
            outcome = {
                "found": cell is not None,
                "cell": list(cell) if cell else None,
                "target": target,
                "found_depth": trace.found_depth,
            }
        else:
            cell, report = quantum_2d_search(
                array, target, rng=rng, ledger=ledger
            )
            success_prob = report.outer_success
            outcome = {
                "found": cell is not None,
                "cell": list(cell) if cell else None,
                "target": target,
            }
    elif algorithm == "ddim":
        if kind != "ndarray":
            raise RangeError("ddim needs an ndarray instance")
        nd = parse_ndarray_text(instance["text"])
        target = _concrete_target(nd.flat, target_spec, rng)
        result = ddim_search(nd, target, seed=rng.getrandbits(32), ledger=ledger)
        outcome = {
            "found": result.cell is not None,
            "cell": list(result.cell) if result.cell else None,
            "target": target,
            "asymptotic_budget": result.asymptotic_budget,
        }
    elif algorithm in ("intersect-single", "intersect-multi"):
        if kind != "lists":
            raise RangeError(f"{algorithm} needs a lists instance, got {kind}")
        L, M = parse_lists_text(instance["text"])
        if algorithm == "intersect-single":
            match = intersect.single_block_search(
                L, M, rng=rng, ledger=ledger
            )
            outcome = {
                "found": match is not None,
                "value": match.value if match else None,
                "index_L": match.index_L if match else None,
                "index_M": match.index_M if match else None,
            }
        else:
            result = intersect.multi_block_intersect(
                L, M, seed=rng.getrandbits(32), ledger=ledger
            )
            match = result.match
            outcome = {
                "found": match is not None,
                "value": match.value if match else None,
                "index_L": match.index_L if match else None,
                "index_M": match.index_M if match else None,
                "round": result.round,
                "queries_L": result.queries_L,
                "queries_M": result.queries_M,
            }
    else:  # pragma: no cover
        raise RangeError(f"unhandled algorithm {algorithm!r}")

    wall = time.perf_counter() - started
    descriptor = {k: v for k, v in instance.items() if k != "text"}
    descriptor["sha"] = hashlib.sha256(instance["text"].encode()).hexdigest()[:12]
    return RunRecord(
        algorithm=algorithm,
        instance=descriptor,
        trial=trial,
        seed=seed,
        outcome=outcome,
        queries=ledger.snapshot(),
        success_prob=success_prob,
        wall_time_s=wall,
    )


# ---------------------------------------------------------------------------
# Scaling studies
# ---------------------------------------------------------------------------


def parse_size_range(spec: str) -> list[int]:
    """Accepts '2^4..2^10' (geometric, power-of-two) or '16,32,64' lists."""
    spec = spec.strip()
    if ".." in spec:
        lo_s, hi_s = spec.split("..")

        def as_int(tok: str) -> int:
            tok = tok.strip()
            if "^" in tok:
                base, exp = tok.split("^")
                return int(base) ** int(exp)
            return int(tok)

        lo, hi = as_int(lo_s), as_int(hi_s)
        sizes = []
        size = lo
        while size <= hi:
            sizes.append(size)
            size *= 2
        return sizes
    return [int(tok) for tok in spec.split(",") if tok.strip()]


def scale_instance(algorithm: str, family: str, size: int, seed: int) -> dict:
    """In-memory instance descriptor for one scaling point."""
    rng = random.Random(seed)
    if algorithm in ("array2d-c", "array2d-q"):
        array = arrays.random_sorted_array(size, size, rng)
        text = arrays.format_array_csv(array)
        return {"kind": "array", "family": family, "size": size, "text": text}
    if algorithm in ("forest", "forest-multi", "halving"):
        if family == "chain":
            p = chain(size)
        elif family == "antichain":
            p = antichain(size)
        elif family == "kary":
            levels = max(1, int(math.log2(max(2, size))))
            p = forest_poset(2, levels)
        else:
            p = poset_mod.random_forest(size, seed)
        return {
            "kind": "poset",
            "family": family,
            "size": size,
            "text": format_poset_text(p),
        }
    if algorithm in ("dilworth-c", "dilworth-q"):
        p = grid_poset(2, size)
        values = assign_random_linear_extension(p, rng)
        return {
            "kind": "values",
            "family": family,
            "size": size,
            "text": format_instance_text(p, values),
        }
    if algorithm in ("intersect-single", "intersect-multi"):
        z = 3 if size >= 3 else 1
        L, M = planted_lists(size, size, z, seed)
        text = " ".join(map(str, L)) + "\n" + " ".join(map(str, M)) + "\n"
        return {"kind": "lists", "family": family, "size": size, "text": text}
    raise RangeError(f"scale does not support algorithm {algorithm!r}")


def fit_loglog(sizes, means) -> dict:
    """Least-squares slope on log-log axes with a 95% confidence interval."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(means, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    dof = max(1, len(x) - 2)
    s_err = math.sqrt(float(resid @ resid) / dof / float(((x - x.mean()) ** 2).sum()))
    return {
        "slope": float(slope),
        "intercept": float(intercept),
        "ci_low": float(slope - 1.96 * s_err),
        "ci_high": float(slope + 1.96 * s_err),
    }


def run_scale(algorithm: str, family: str, sizes, seeds: int, budget=None):
    rows = []
    means = []
    for size in sizes:
        totals = []
        for s in range(seeds):
            instance = scale_instance(algorithm, family, size, seed=s)
            record = run_algorithm(algorithm, instance, seed=s, trial=0, budget=budget)
            totals.append(record.queries["total"])
        mean_total = sum(totals) / len(totals)
        rows.append(
            {
                "size": size,
                "seeds": seeds,
                "mean_queries": mean_total,
                "max_queries": max(totals),
            }
        )
        means.append(mean_total)
    fit = fit_loglog(sizes, means)
    return rows, fit


# ---------------------------------------------------------------------------
# Analysis report
# ---------------------------------------------------------------------------


def analyze_poset(p: Poset) -> dict:
    """Structural analysis plus predicted query budgets, with size guards."""
    report: dict = {"n": p.n, "is_forest": p.is_forest()}
    if p.n == 0:
        return report
    w = width(p)
    h = height(p)
    decomposition = dilworth_decomposition(p)
    report["width"] = w
    report["height"] = h
    report["chain_lengths"] = sorted((len(c) for c in decomposition.chains), reverse=True)
    if p.n <= IDEAL_COUNT_MAX_N:
        report["ideals"] = count_ideals(p)
    else:
        report["ideals"] = None
    if p.n <= DECISION_DEPTH_MAX_N:
        report["decision_depth"] = exact_decision_depth(p)
    else:
        report["decision_depth"] = None
    if 2 <= p.n <= GAMMA_MAX_N:
        gamma = gamma_bruteforce(p)
        report["gamma"] = {
            "fraction": f"{gamma.value.numerator}/{gamma.value.denominator}",
            "float": float(gamma.value),
            "witness_subset": sorted(gamma.witness_subset),
            "witness_query": list(gamma.witness_query),
        }
        inv_sqrt_gamma = math.ceil(1.0 / math.sqrt(float(gamma.value)))
        log2n = max(1, math.ceil(math.log2(max(2, p.n))))
        report["predicted_budgets"] = {
            "halving_queries": math.ceil(math.log(p.n) / float(gamma.value)) + 1,
            "forest_quantum_queries": log2n * inv_sqrt_gamma,
            "dilworth_classical_queries": sum(
                math.ceil(math.log2(len(c) + 1)) for c in decomposition.chains
            ),
            "dilworth_quantum_queries": (grover_iterations(w) + 1)
            * math.ceil(math.log2(decomposition.max_chain_length() + 1)),
        }
    else:
        report["gamma"] = None
    return report


# ---------------------------------------------------------------------------
# argparse wiring
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posetsearch",
        description="search experiments over partially ordered sets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate instance files")
    gen.add_argument("family", choices=GEN_FAMILIES)
    gen.add_argument("--n", type=int, default=8)
    gen.add_argument("--m", type=int, default=3)
    gen.add_argument("--d", type=int, default=2)
    gen.add_argument("--arity", type=int, default=2)
    gen.add_argument("--levels", type=int, default=3)
    gen.add_argument("--density", type=float, default=0.2)
    gen.add_argument("--planted", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output path prefix")

    run = sub.add_parser("run", help="run an algorithm on an instance file")
    run.add_argument("algorithm", choices=ALGORITHMS)
    run.add_argument("--instance", required=True)
    run.add_argument("--target", default=None, help="value/id, 'absent', or omit for random")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--trials", type=int, default=1)
    run.add_argument("--budget", type=int, default=None)
    run.add_argument("--out", default=None)
    run.add_argument("--format", choices=("json", "csv"), default="json")

    scale = sub.add_parser("scale", help="scaling study with log-log fit")
    scale.add_argument("algorithm", choices=ALGORITHMS)
    scale.add_argument("--family", default="array2d")
    scale.add_argument("--sizes", required=True, help="e.g. 2^4..2^10 or 16,32,64")
    scale.add_argument("--seeds", type=int, default=20)
    scale.add_argument("--budget", type=int, default=None)
    scale.add_argument("--out", default=None)
    scale.add_argument("--format", choices=("json", "csv"), default="csv")

    analyze = sub.add_parser("analyze", help="structural report for a poset file")
    analyze.add_argument("poset_file")
    return parser


def _instance_kind(path: str) -> str:
    if path.endswith(".poset"):
        return "poset"
    if path.endswith(".values"):
        return "values"
    if path.endswith(".csv"):
        return "array"
    if path.endswith(".lists"):
        return "lists"
    if path.endswith(".nd"):
        return "ndarray"
    raise RangeError(f"cannot infer instance kind from {path!r}")


def cmd_gen(args) -> int:
    params = {
        "n": args.n,
        "m": args.m,
        "d": args.d,
        "arity": args.arity,
        "levels": args.levels,
        "density": args.density,
        "planted": args.planted,
    }
    files = generate_instance(args.family, params, args.seed)
    for name, content in files.items():
        suffix = name.split(".")[-1]
        path = f"{args.out}.{suffix}"
        with open(path, "w") as fh:
            fh.write(content)
        print(path)
    return 0


def cmd_run(args) -> int:
    with open(args.instance) as fh:
        text = fh.read()
    instance = {
        "kind": _instance_kind(args.instance),
        "path": args.instance,
        "text": text,
    }
    if args.target is not None:
        instance["target"] = args.target
    sink = open(args.out, "w") if args.out else sys.stdout
    try:
        for trial in range(args.trials):
            record = run_algorithm(
                args.algorithm, instance, args.seed, trial, budget=args.budget
            )
            sink.write(record.to_json() + "\n")
    finally:
        if args.out:
            sink.close()
    return 0


def cmd_scale(args) -> int:
    sizes = parse_size_range(args.sizes)
    rows, fit = run_scale(args.algorithm, args.family, sizes, args.seeds, args.budget)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("size,seeds,mean_queries,max_queries\n")
            for row in rows:
                fh.write(
                    f"{row['size']},{row['seeds']},{row['mean_queries']:.3f},{row['max_queries']}\n"
                )
    print(json.dumps({"algorithm": args.algorithm, "fit": fit, "rows": rows}))
    return 0


def cmd_analyze(args) -> int:
    with open(args.poset_file) as fh:
        p = parse_poset_text(fh.read())
    print(json.dumps(analyze_poset(p), sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gen": cmd_gen,
        "run": cmd_run,
        "scale": cmd_scale,
        "analyze": cmd_analyze,
    }
    try:
        return handlers[args.command](args)
    except (PromiseViolation, ConditionViolation) as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return 2
    except (PosetSearchError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
