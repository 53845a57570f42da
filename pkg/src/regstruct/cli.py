"""Command-line entry point.

Exit codes: 0 ok, 1 bad input, 2 equation not subcritical, 3 counterterm
left residual terms, 4 a run failed (self-check mismatch, blow-up,
quadrature failure).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .counterterm import ResidualTerms, phi4_ansatz, phi4_character, renormalised_rhs, truncated_power
from .notation import TreeSyntaxError, format_tree, format_tree_polynomial, parse_tree
from .polys import Poly
from .powercount import GraphError, load_graphs, two_connectivity, weinberg_check
from .renorm import CharacterError, character_from_json, compose, invert, random_character, renorm_map
from .structgen import (
    NonSubcritical,
    SpecError,
    binding_shape,
    check_subcriticality,
    generate_symbols,
    load_spec,
)
from .symbols import Degree, Grading, TreePolynomial, as_degree, format_degree

EXIT_OK, EXIT_INPUT, EXIT_NONSUBCRITICAL, EXIT_RESIDUAL, EXIT_FAILED = 0, 1, 2, 3, 4
OUT_ENV = "REGSTRUCT_OUT"


class InputError(Exception):
    pass


class RunFailed(Exception):
    pass


# --------------------------------------------------------------------------
# serialisation


def fmt_float(x: float) -> str:
    return f"{x:.17g}"


def fmt_value(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Degree):
        return format_degree(x)
    if isinstance(x, float):
        return fmt_float(x)
    return str(x)


def dumps(obj, indent: int = 0) -> str:
    """JSON with floats at 17 significant digits and rationals as ``"p/q"``."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return json.dumps(fmt_float(obj))
        return fmt_float(obj)
    if isinstance(obj, (Fraction, Degree, Poly)):
        return json.dumps(fmt_value(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, str, Fraction)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if hasattr(obj, "tolist"):
        return dumps(obj.tolist(), indent)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt_value(v) for v in r])
    return buf.getvalue()


# --------------------------------------------------------------------------
# input handling


def data_file(name: str) -> Path:
    """Path of a file shipped with the package."""
    return Path(str(resources.files("regstruct") / "data" / name))


def resolve_input(path: str, base: Path | None = None) -> Path:
    """Look for ``path`` as given, then next to ``base``, then among the shipped files."""
    p = Path(path)
    if p.exists():
        return p
    if base is not None and (base / p).exists():
        return base / p
    shipped = data_file(p.name)
    if shipped.exists():
        return shipped
    raise InputError(f"{path}: no such file")


def read_json(path: Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None


def parse_ladder(text: str) -> list:
    try:
        vals = [float(Fraction(v.strip())) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad --epsilon-ladder {text!r}; expected comma separated numbers") from None
    if not vals or any(not 0 < v < 1 for v in vals):
        raise InputError("--epsilon-ladder values must lie in (0, 1)")
    return vals


class Run:
    """Where and how a subcommand writes its results."""

    def __init__(self, args):
        self.args = args
        self.input = resolve_input(args.input)
        self.stem = self.input.stem
        self.out = Path(args.out or os.environ.get(OUT_ENV) or "regstruct-out")
        self.format = args.format
        self.out.mkdir(parents=True, exist_ok=True)
        self.written = []

    def write(self, name: str, text: str) -> Path:
        p = self.out / name
        with open(p, "w", newline="") as fh:
            fh.write(text)
        self.written.append(p)
        return p

    def emit(self, suffix: str, text: str, records: dict, table=None):
        """Write a report in the requested format: ``text``, ``json`` or ``csv``."""
        if self.format == "json":
            self.write(f"{self.stem}{suffix}.json", dumps(records) + "\n")
        elif self.format == "csv":
            if table is None:
                raise InputError("this report has no tabular form; use --format json or text")
            self.write(f"{self.stem}{suffix}.csv", csv_text(*table))
        else:
            self.write(f"{self.stem}{suffix}.txt", text)


# --------------------------------------------------------------------------
# symbols


def cmd_symbols(run: Run) -> int:
    try:
        spec = load_spec(run.input)
    except SpecError as e:
        raise InputError(str(e)) from None
    try:
        gamma = as_degree(run.args.gamma) if run.args.gamma else spec.cutoff
    except ValueError as e:
        raise InputError(f"bad --gamma: {e}") from None
    _, margin = check_subcriticality(spec)
    try:
        table = generate_symbols(spec, gamma)
    except NonSubcritical as e:
        shape = e.shape or binding_shape(spec)
        diag = {
            "equation": spec.name,
            "verdict": "non-subcritical",
            "binding_shape": shape.describe(spec.noise_names) if shape else None,
            "margin": margin,
            "message": str(e),
            "witness": [format_tree(t) for t in e.witness],
        }
        run.write(f"{run.stem}.diagnostics.json", dumps(diag) + "\n")
        print(f"{spec.name}: non-subcritical ({e})")
        return EXIT_NONSUBCRITICAL

    rows = list(table.rows())
    f0, f1 = set(table.f0), set(table.f1)
    verdict = "subcritical" + (f", margin {format_degree(margin)}" if margin is not None else ", linear rule")
    width = max(len(r[0]) for r in rows)
    lines = [f"# {spec.name}: {verdict}; gamma = {format_degree(gamma)}; {len(rows)} symbols", f"{'symbol':<{width}}  degree  negative"]
    for t, (name, const, kappa, neg) in zip(table.trees, rows):
        lines.append(f"{name:<{width}}  {format_degree(Degree(const, kappa))}  {'yes' if neg else 'no'}")
    records = {
        "equation": spec.name,
        "verdict": "subcritical",
        "margin": margin,
        "gamma": gamma,
        "symbols": [
            {
                "notation": name,
                "degree": Degree(const, kappa),
                "const": const,
                "kappa": kappa,
                "in_negative_sector": neg,
                "in_F0": t in f0,
                "in_F1": t in f1,
            }
            for t, (name, const, kappa, neg) in zip(table.trees, rows)
        ],
    }
    run.emit("", "\n".join(lines) + "\n", records, (["notation", "const", "kappa", "in_negative_sector"], rows))
    print(f"{spec.name}: {verdict}; {len(rows)} symbols below {format_degree(gamma)}")
    return EXIT_OK


# --------------------------------------------------------------------------
# renorm


def _grading_from(data: dict, base: Path) -> Grading:
    if "equation" in data:
        try:
            return load_spec(resolve_input(data["equation"], base)).grading
        except SpecError as e:
            raise InputError(str(e)) from None
    if "noise_degrees" not in data:
        raise InputError("need 'noise_degrees' or 'equation' to fix the degrees")
    try:
        return Grading(tuple(as_degree(str(d)) for d in data["noise_degrees"]), Fraction(str(data.get("kernel_order", 2))))
    except ValueError as e:
        raise InputError(f"bad noise degree: {e}") from None


def _group_law_check(check: dict, seed: int, base: Path) -> dict:
    try:
        spec = load_spec(resolve_input(check["equation"], base))
    except SpecError as e:
        raise InputError(str(e)) from None
    except KeyError:
        raise InputError("self_check needs an 'equation'") from None
    gr = spec.grading
    table = generate_symbols(spec, check.get("gamma"))
    trees = [t for t in table.trees if t.n_edges <= int(check.get("max_edges", 6))]
    sector = [t for t in table.negative_sector if t.n_edges <= int(check.get("max_edges", 6))]
    rng = random.Random(seed)
    pairs = int(check.get("pairs", 5))
    failures = 0
    for _ in range(pairs):
        f = random_character(sector, gr, rng)
        g = random_character(sector, gr, rng)
        fg = compose(f, g, trees, gr)
        gi = invert(g, trees, gr)
        for t in trees:
            lhs = renorm_map(f, renorm_map(g, t, grading=gr), grading=gr)
            if lhs != renorm_map(fg, t, grading=gr):
                failures += 1
            if renorm_map(gi, renorm_map(g, t, grading=gr), grading=gr) != TreePolynomial.of(t):
                failures += 1
    return {"pairs": pairs, "trees": len(trees), "seed": seed, "failures": failures, "status": "pass" if failures == 0 else "fail"}


def cmd_renorm(run: Run) -> int:
    data = read_json(run.input)
    base = run.input.parent
    gr = _grading_from(data, base)
    try:
        g = character_from_json(data.get("character", {}), gr)
        trees = [parse_tree(s) for s in data.get("trees", [])]
    except (CharacterError, TreeSyntaxError, ValueError) as e:
        raise InputError(f"{run.input}: {e}") from None
    extended = bool(data.get("extended", False))
    results = []
    for t in trees:
        results.append((format_tree(t), format_tree_polynomial(renorm_map(g, t, extended, gr))))
    lines = [f"M_g <{name}> = {image}" for name, image in results]
    records = {"character": {format_tree(t): v for t, v in g.items()}, "extended": extended, "images": [{"tree": n, "image": i} for n, i in results]}
    status = None
    if "self_check" in data:
        seed = run.args.seed if run.args.seed is not None else int(data["self_check"].get("seed", 0))
        status = _group_law_check(data["self_check"], seed, base)
        lines.append(
            f"group law: {status['status']} ({status['pairs']} random pairs, {status['trees']} trees, seed {status['seed']})"
        )
        records["group_law"] = status
    run.emit("", "\n".join(lines) + "\n", records, (["tree", "image"], results))
    print("\n".join(lines))
    if status is not None and status["failures"]:
        raise RunFailed(f"group law failed on {status['failures']} checks")
    return EXIT_OK


# --------------------------------------------------------------------------
# counterterm


def cmd_counterterm(run: Run) -> int:
    data = read_json(run.input)
    try:
        dim = int(data.get("dimension", 3))
        nd = data.get("noise_degree")
        gamma = run.args.gamma or data.get("gamma")
        a = phi4_ansatz(dim, as_degree(str(nd)) if nd is not None else None, as_degree(str(gamma)) if gamma else None)
        if "character" in data:
            g = character_from_json(data["character"], a.grading)
        else:
            g = phi4_character(a.grading)
    except (CharacterError, TreeSyntaxError, ValueError) as e:
        raise InputError(f"{run.input}: {e}") from None
    cube = truncated_power(a, 3)
    try:
        ct = renormalised_rhs(a, -cube, g)
    except ResidualTerms as e:
        print(f"residual terms: {format_tree_polynomial(e.terms)}", file=sys.stderr)
        return EXIT_RESIDUAL
    lines = [
        f"solution: {format_tree_polynomial(a.expansion)}",
        f"cube: {format_tree_polynomial(cube)}",
        f"counterterm: {format_tree_polynomial(ct.counterterm)}",
        f"dual: {ct.dual_text()}",
    ]
    records = {
        "dimension": dim,
        "gamma": a.gamma,
        "solution": format_tree_polynomial(a.expansion),
        "cube": format_tree_polynomial(cube),
        "counterterm": format_tree_polynomial(ct.counterterm),
        "factor": str(ct.factor),
        "dual": {k: str(v) for k, v in ct.dual.items()},
    }
    table = (["coupling", "new_value"], [(k, str(v)) for k, v in ct.dual.items()])
    run.emit("", "\n".join(lines) + "\n", records, table)
    print(f"dual: {ct.dual_text()}")
    return EXIT_OK


# --------------------------------------------------------------------------
# powercount


def cmd_powercount(run: Run) -> int:
    try:
        graphs = load_graphs(run.input)
        results = [(g, weinberg_check(g), two_connectivity(g)) for g in graphs]
    except GraphError as e:
        raise InputError(f"{run.input}: {e}") from None
    lines, rows, recs = [], [], []
    for g, r, two in results:
        name = g.name or "graph"
        lines.append(f"{name}: {r.summary()}; 2-connected: {'yes' if two else 'no'}")
        rows.append((name, "convergent" if r.convergent else "divergent", r.margin, r.edge_sum, r.bound, " ".join(map(str, r.worst_subgraph)), two))
        recs.append(
            {
                "name": name,
                "verdict": "convergent" if r.convergent else "divergent",
                "margin": r.margin,
                "edge_sum": r.edge_sum,
                "bound": r.bound,
                "worst_subgraph": [str(v) for v in r.worst_subgraph],
                "two_connected": two,
            }
        )
    header = ["name", "verdict", "margin", "edge_sum", "bound", "worst_subgraph", "two_connected"]
    run.emit("", "\n".join(lines) + "\n", {"graphs": recs}, (header, rows))
    print("\n".join(lines))
    return EXIT_OK


# --------------------------------------------------------------------------
# simulate


def cmd_simulate(run: Run) -> int:
    from .numerics import BlowUp, TorusGrid, ladder_experiment

    cfg = read_json(run.input)
    try:
        gcfg = dict(cfg.get("grid", {}))
        seed = run.args.seed if run.args.seed is not None else int(cfg.get("seed", 0))
        grid = TorusGrid(
            int(gcfg.get("d", 2)), int(gcfg.get("N", 64)), float(gcfg.get("L", 1.0)), float(gcfg.get("dt", 1e-3)), float(gcfg.get("T", 1.0)), seed
        )
        ladder = parse_ladder(run.args.epsilon_ladder) if run.args.epsilon_ladder else [float(e) for e in cfg["epsilon_ladder"]]
        replicas = int(cfg.get("replicas", 1))
    except KeyError as e:
        raise InputError(f"{run.input}: missing field {e.args[0]!r}") from None
    except (TypeError, ValueError) as e:
        raise InputError(f"{run.input}: {e}") from None
    rows, summary = [], {"seed": seed, "epsilon_ladder": ladder, "replicas": []}
    for rep in range(replicas):
        try:
            res = ladder_experiment(
                grid,
                ladder,
                float(cfg.get("coupling", 0.0)),
                cfg.get("mollifier", "gaussian"),
                float(cfg.get("psi0", 1.0)),
                save_every=int(cfg.get("save_every", 10)),
                replica=rep,
            )
        except BlowUp as e:
            raise RunFailed(str(e)) from None
        except ValueError as e:
            raise InputError(f"{run.input}: {e}") from None
        for eps, kind, times, vals in res.series:
            for t, v in zip(times, vals):
                rows.append((rep, float(eps), kind, float(t), float(v)))
        d = res.as_dict()
        d["cauchy"] = all(r < 0.7 for r in res.gap_ratios)
        summary["replicas"].append(d)
    run.write(f"{run.stem}_trajectories.csv", csv_text(["replica", "eps", "kind", "t", "pairing"], rows))
    run.write(f"{run.stem}_summary.json", dumps(summary) + "\n")
    for d in summary["replicas"]:
        ratios = ", ".join(f"{r:.3g}" for r in d["gap_ratios"])
        print(f"replica {d['replica']}: gap ratios [{ratios}]; naive monotone: {'yes' if d['naive_monotone'] else 'no'}")
    return EXIT_OK


# --------------------------------------------------------------------------
# toy distribution


def _toy_test_function(spec: dict):
    kind = spec.get("kind", "gaussian")
    if kind != "gaussian":
        raise InputError(f"unknown test function kind {kind!r}")
    x0 = float(spec.get("centre", 0.0))
    w = float(spec.get("width", 1.0))
    if w <= 0:
        raise InputError("test function width must be positive")
    return lambda x: math.exp(-((x - x0) ** 2) / (2 * w * w))


def cmd_toy(run: Run) -> int:
    from .numerics import QuadratureError, convergence_table, observed_rate, toy_distribution, toy_limit

    cfg = read_json(run.input)
    try:
        hat_c = tuple(float(v) for v in cfg["hat_c"])
        etas = list(cfg.get("eta", ["flat"]))
        phi = _toy_test_function(cfg.get("test_function", {}))
        ladder = parse_ladder(run.args.epsilon_ladder) if run.args.epsilon_ladder else [float(e) for e in cfg["epsilon_ladder"]]
    except KeyError as e:
        raise InputError(f"{run.input}: missing field {e.args[0]!r}") from None
    except (TypeError, ValueError) as e:
        raise InputError(f"{run.input}: {e}") from None
    try:
        limit = toy_limit(hat_c, phi)
        tables = {eta: convergence_table(eta, ladder, hat_c, phi) for eta in etas}
        h = 1e-3
        e0 = ladder[-1]
        fd = (toy_distribution(etas[0], e0, (hat_c[0], hat_c[1] + h), phi) - toy_distribution(etas[0], e0, (hat_c[0], hat_c[1] - h), phi)) / (2 * h)
    except QuadratureError as e:
        raise RunFailed(str(e)) from None
    except ValueError as e:
        raise InputError(f"{run.input}: {e}") from None
    rows = [(eta, e, m, err) for eta, tab in tables.items() for e, m, err in tab]
    spread = [max(tab[i][1] for tab in tables.values()) - min(tab[i][1] for tab in tables.values()) for i in range(len(ladder))]
    summary = {
        "hat_c": list(hat_c),
        "limit": limit,
        "rates": {eta: observed_rate(tab) for eta, tab in tables.items()},
        "profile_spread": spread,
        "dM_dc2": fd,
        "minus_phi0": -phi(0.0),
    }
    text = "\n".join(f"{eta}  {fmt_float(e)}  {fmt_float(m)}  {fmt_float(err)}" for eta, e, m, err in rows) + "\n"
    run.emit("", text, {"table": [dict(zip(("eta", "eps", "value", "error"), r)) for r in rows], "summary": summary}, (["eta", "eps", "value", "error"], rows))
    run.write(f"{run.stem}_summary.json", dumps(summary) + "\n")
    for eta, r in summary["rates"].items():
        print(f"{eta}: observed rate {r:.3f}")
    print(f"dM/dc2 = {fd:.12g}, -phi(0) = {-phi(0.0):.12g}")
    return EXIT_OK


# --------------------------------------------------------------------------


COMMANDS = {
    "symbols": (cmd_symbols, "generate the symbol table of an equation"),
    "renorm": (cmd_renorm, "apply a renormalisation character to trees"),
    "counterterm": (cmd_counterterm, "derive the counterterm of the cubic model"),
    "powercount": (cmd_powercount, "power-count Feynman graphs"),
    "simulate": (cmd_simulate, "run the renormalised/naive epsilon ladder in d = 2"),
    "toy-dist": (cmd_toy, "converge the one-dimensional toy distribution"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="regstruct", description="Symbolic and numeric renormalisation toolkit.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--input", required=True, help="input JSON file (shipped files can be named directly)")
        s.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./regstruct-out)")
        s.add_argument("--format", choices=("csv", "json", "text"), default="text")
        s.add_argument("--seed", type=int)
        s.add_argument("--gamma", help="regularity cutoff, e.g. '3/2 - k'")
        s.add_argument("--epsilon-ladder", help="comma separated regularisation scales")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = Run(args)
        return COMMANDS[args.command][0](run)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except RunFailed as e:
        print(f"failed: {e}", file=sys.stderr)
        return EXIT_FAILED
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
