"""Command-line front end: ladders, overorder lattices, prime classification, graphs, volcano checks."""

import argparse
import ast
import json
import sys
from pathlib import Path

from .algebra_core import make_algebra
from .classgroup import load_external_chains
from .errors import IsoLadderError, NotSingular
from .graph import assemble_specs, build_graph, classify_isogeny_class, component_count, strong_connectivity_check
from .ladders import (build_ladder, classify_splitting, count_ladders, enumerate_overorders, find_base_order,
                      ladder_laws_hold, singular_primes)
from .lmfdb_client import fetch
from .maximalization import FactoredIndex, maximal_order, set_maximal_order_hints
from .orders import cm_type, is_bass_at, maximal_ideals_above, multiplicator_ring, order_from_generators
from .volcano import volcano_verdict


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ input handling


def _load_poly(path):
    try:
        data = json.loads(Path(path).read_text())
        h = [int(c) for c in data["h"]]
        q = data.get("q")
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read polynomial file {path}: {exc}") from None
    return h, (int(q) if q is not None else None)


def load_algebra(args):
    if bool(args.label) == bool(args.poly):
        raise UsageError("give exactly one of --label and --poly")
    if args.label:
        rec = fetch(args.label, offline=args.offline)
        h, q = [int(c) for c in rec["h"]], int(rec["q"])
    else:
        h, q = _load_poly(args.poly)
    A = make_algebra(h, q)
    if args.disc_factors:
        try:
            hints = FactoredIndex.parse(args.disc_factors)
        except ValueError:
            raise UsageError(f"cannot parse --disc-factors {args.disc_factors!r}") from None
        set_maximal_order_hints(A, hints)
    return A


_BINOPS = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b,
           ast.Mult: lambda a, b: a * b, ast.Div: lambda a, b: a / b}


def parse_element(text, A):
    """Evaluate an expression in pi and q (integers, + - * / ^) inside the algebra."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError:
        raise UsageError(f"cannot parse element {text!r}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return A.one * node.value
        if isinstance(node, ast.Name) and node.id in ("pi", "x", "F"):
            return A.pi
        if isinstance(node, ast.Name) and node.id == "q":
            if A.q is None:
                raise UsageError("q is not set")
            return A.one * A.q
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                raise UsageError("exponents must be integer literals")
            return ev(node.left) ** node.right.value
        raise UsageError(f"unsupported syntax in {text!r}")

    return ev(tree)


def _split_generators(text):
    text = text.strip()
    if text.startswith("Z[") and text.endswith("]"):
        text = text[2:-1]
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        depth += (ch == "(") - (ch == ")")
        cur += ch
    parts.append(cur)
    return [p.strip() for p in parts if p.strip()]


def load_order(A, text):
    if text in ("max", "O_K"):
        return maximal_order(A)
    return order_from_generators(A, [parse_element(g, A) for g in _split_generators(text)])


def select_ideal(R, args):
    if args.ell is None:
        raise UsageError("--ell is required")
    ideals = maximal_ideals_above(R, args.ell)
    if args.ideal_size is not None:
        ideals = [m for m in ideals if m.residue_size == args.ideal_size]
    ideals = sorted(ideals, key=lambda m: (not m.is_singular, m.residue_size, m.lattice.sort_key()))
    if not ideals:
        raise UsageError(f"no maximal ideal above {args.ell} matches the selection")
    if not 0 <= args.ideal_index < len(ideals):
        raise UsageError(f"--ideal-index must be below {len(ideals)}")
    return ideals[args.ideal_index]


def resolve_order_and_ideal(A, args, default):
    spec = args.order or default
    if spec == "auto":
        O = order_from_generators(A, [A.pi, A.q_over_pi()])
        L = select_ideal(O, args)
        if not L.is_singular:
            raise NotSingular("find_base_order needs a singular prime")
        found = find_base_order(O, L)
        if found is None:
            raise NotSingular("no Bass base order below the selected prime")
        return found
    R = load_order(A, spec)
    return R, select_ideal(R, args)


def _index(S):
    return S.index_in(maximal_order(S.algebra))


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


# ------------------------------------------------------------------ subcommands


def cmd_ladder(args):
    A = load_algebra(args)
    R, l = resolve_order_and_ideal(A, args, "Z[pi,q/pi]")
    ladder = build_ladder(R, l)
    info = {
        "ell": l.residue_char, "residue_size": l.residue_size, "d": ladder.d,
        "indices_in_O_K": [_index(S) for S in ladder.orders],
        "splitting": ladder.top_splitting.describe() if ladder.top_splitting else None,
        "delta": ladder.delta, "bass": is_bass_at(R, l), "laws_hold": ladder_laws_hold(ladder),
        "count_ladders": count_ladders(R, l),
    }
    print(f"base index {_index(R)}, prime above {info['ell']} with residue field of size {info['residue_size']}")
    print(f"ladder length d = {ladder.d}; rungs O_0..O_d have O_K-indices {info['indices_in_O_K']}")
    print(f"splitting at the top: {info['splitting']}; Bass at l: {info['bass']}; "
          f"ladder laws: {info['laws_hold']}; ladders through l: {info['count_ladders']}")
    if args.json:
        _write(args.json, _dumps(info))
    return 0


def hasse_dot(orders):
    idx = [_index(S) for S in orders]
    lines = ["digraph overorders {", "  rankdir=BT;", "  node [shape=box];"]
    for i, S in enumerate(orders):
        lines.append(f"  o{i} [label=\"{idx[i]}\"];")
    for i, S in enumerate(orders):
        for j, T in enumerate(orders):
            if S < T and not any(S < U < T for U in orders):
                lines.append(f"  o{i} -> o{j} [label=\"{idx[i] // idx[j]}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_overorders(args):
    A = load_algebra(args)
    R = load_order(A, args.order or "Z[pi,q/pi]")
    orders = enumerate_overorders(R, method=args.method)
    print(f"{len(orders)} overorders")
    for i, S in enumerate(orders):
        sing = singular_primes(S)
        types = sorted(cm_type(S, m) for m in sing)
        print(f"  o{i}: index {_index(S)}, singular primes {[m.residue_size for m in sing]}, CM types {types}")
    if args.dot:
        _write(args.dot, hasse_dot(orders))
    if args.json:
        _write(args.json, _dumps({"orders": [{"id": f"o{i}", "index": _index(S), "lattice": S.lattice.to_json()}
                                             for i, S in enumerate(orders)]}))
    return 0


def cmd_classify_prime(args):
    A = load_algebra(args)
    R = load_order(A, args.order or "Z[pi,q/pi]")
    primes = singular_primes(R) if args.ell is None else [select_ideal(R, args)]
    out = []
    for l in primes:
        st = classify_splitting(R, l)
        T = multiplicator_ring(l)
        row = {"ell": l.residue_char, "residue_size": l.residue_size, "type": st.describe(),
               "bass": is_bass_at(R, l), "index_of_R_in_T": _index(R) // _index(T)}
        out.append(row)
        print(f"prime above {row['ell']} of size {row['residue_size']}: {row['type']}")
    if args.json:
        _write(args.json, _dumps({"primes": out}))
    return 0


def _graph(args):
    A = load_algebra(args)
    R, l = resolve_order_and_ideal(A, args, "auto")
    chains = None
    src = args.class_data or "imquad"
    if src.startswith("file:"):
        chains = load_external_chains(src[5:])
    elif src != "imquad":
        raise UsageError("--class-data must be imquad or file:PATH")
    ctx = classify_isogeny_class(A, args.N)
    specs = assemble_specs(R, l, chains=chains, N=args.N, context=ctx)
    return ctx, specs, build_graph(specs)


def _print_graph(ctx, specs, G):
    print(f"isogeny class kind {ctx.kind}, N = {specs[0].N} ({ctx.N_rule})")
    for k, s in enumerate(specs):
        print(f"ladder {k}: d = {s.d}, d_min = {s.d_min}, class numbers "
              f"{[g.order for g in s.chain.groups[:s.d_min + 1]]}")
    print(f"{component_count(specs)} components, {len(G.vertices)} vertices, {len(G.edges)} edges")
    for c in G.components():
        kinds = {}
        for e in G.component_edges(c):
            kinds[e.kind] = kinds.get(e.kind, 0) + 1
        print(f"  component {c}: level sizes {G.level_sizes(c)}, edges "
              + ", ".join(f"{k} {kinds[k]}" for k in sorted(kinds)))
    for w in G.warnings:
        print(f"warning: {w}")


def cmd_graph(args):
    ctx, specs, G = _graph(args)
    _print_graph(ctx, specs, G)
    report = strong_connectivity_check(G)
    print(f"strong connectivity: {'ok' if report['ok'] else 'violated'}")
    if args.json:
        _write(args.json, G.dumps() + "\n")
    if args.dot:
        _write(args.dot, G.to_dot())
    return 0


def cmd_volcano_check(args):
    ctx, specs, G = _graph(args)
    _print_graph(ctx, specs, G)
    verdicts = volcano_verdict(G)
    for v in verdicts:
        shape = f"{v.r}-volcano" if v.is_volcano and v.r else ("volcano" if v.is_volcano else "not a volcano")
        pred = v.predicted
        ptxt = (f"{pred['r']}-volcano" if pred["is_volcano"] and pred["r"] else
                "volcano" if pred["is_volcano"] else
                "not covered by theorem" if not pred["covered"] else "not a volcano")
        print(f"  component {v.component}: structural {shape} ({v.reason}); predicted {ptxt}; "
              f"surface {pred['surface']}" + ("; DISAGREEMENT" if v.disagreement else ""))
    if args.json:
        _write(args.json, _dumps({"schema": 1, "verdicts": [v.to_json() for v in verdicts]}))
    if args.dot:
        _write(args.dot, G.to_dot())
    return 0


def cmd_fetch(args):
    rec = fetch(args.label, offline=args.offline)
    sys.stdout.write(_dumps(rec))
    return 0


# ------------------------------------------------------------------ parser


def _config_defaults(path):
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"bad config line {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value.strip('"')
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="isoladder", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, ideal=True, order=True):
        sp.add_argument("--config", help="key=value file; command-line flags take precedence")
        sp.add_argument("--label", help="LMFDB isogeny-class label, e.g. 3.25.g_cg_ji")
        sp.add_argument("--poly", help="JSON file with ascending coefficients h and q")
        sp.add_argument("--offline", action="store_true", help="never touch the network")
        sp.add_argument("--disc-factors", help="factorization of disc(h), 'p^e,p^e,...'")
        sp.add_argument("--json", help="write JSON output here ('-' for stdout)")
        if order:
            sp.add_argument("--order", help="'Z[pi,q/pi]', generators in pi and q, 'max', or 'auto'")
        if ideal:
            sp.add_argument("--ell", type=int, help="rational prime below the maximal ideal")
            sp.add_argument("--ideal-size", type=int, help="residue field size of the maximal ideal")
            sp.add_argument("--ideal-index", type=int, default=0,
                            help="position among matching ideals (singular first)")

    sp = sub.add_parser("ladder", help="multiplicator ladder of an order at a maximal ideal")
    common(sp)
    sp.set_defaults(func=cmd_ladder)

    sp = sub.add_parser("overorders", help="all overorders and their Hasse diagram")
    common(sp, ideal=False)
    sp.add_argument("--method", choices=["auto", "fast", "brute"], default="auto")
    sp.add_argument("--dot", help="write the Hasse diagram as DOT")
    sp.set_defaults(func=cmd_overorders)

    sp = sub.add_parser("classify-prime", help="splitting type of singular primes")
    common(sp)
    sp.set_defaults(func=cmd_classify_prime)

    for name, func, hlp in (("graph", cmd_graph, "build the leveled (R, l)-isogeny graph"),
                            ("volcano-check", cmd_volcano_check, "structural and predicted volcano verdicts")):
        sp = sub.add_parser(name, help=hlp)
        common(sp)
        sp.add_argument("--class-data", help="'imquad' (default) or 'file:PATH'")
        sp.add_argument("--N", type=int, help="orbit count override")
        sp.add_argument("--dot", help="write the graph as DOT")
        sp.set_defaults(func=func)

    sp = sub.add_parser("fetch", help="Weil polynomial record for an LMFDB label")
    sp.add_argument("label")
    sp.add_argument("--offline", action="store_true")
    sp.set_defaults(func=cmd_fetch)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            defaults = _config_defaults(args.config)
            explicit = parser.parse_args(argv)
            for key, value in defaults.items():
                if not hasattr(args, key):
                    raise UsageError(f"unknown config key {key!r}")
                if getattr(explicit, key) in (None, False):
                    current = getattr(args, key)
                    setattr(args, key, type(current)(value) if isinstance(current, int) and
                            not isinstance(current, bool) else
                            int(value) if key in ("ell", "ideal_size", "N") else
                            value.lower() in ("1", "true", "yes") if key == "offline" else value)
        return args.func(args)
    except UsageError as exc:
        print(f"isoladder: error: {exc}", file=sys.stderr)
        return 2
    except IsoLadderError as exc:
        print(json.dumps(exc.to_json(), sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
