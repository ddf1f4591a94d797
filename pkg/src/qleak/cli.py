"""Command-line interface.

Exit status: 0 ok, 2 bad input, 3 budget exceeded, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import os
import re
import sys
from contextlib import contextmanager

from . import access, leakage, minimal
from .code import expand, gabidulin, is_mrd, min_rank_distance
from .errors import BudgetExceeded, FieldError, InputError, VerificationFailure
from .gf import GF, ExtBasis, FieldCtx
from .io import code_to_json, load_code, rational_json, to_jsonable
from .polymatroid import from_code
from .subspace import Subspace, lattice, quotient, span, zero_space
from .suites import SUITES, run_suite

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_VERIFY = 0, 2, 3, 4

_TERM = re.compile(r"^\s*(\d*)\s*\*?\s*e(\d+)\s*$")


def _split_top(text: str):
    """Split on commas that are not inside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_vector(text: str, n: int, F: FieldCtx):
    text = text.strip()
    if text.startswith("("):
        if not text.endswith(")"):
            raise InputError(f"unbalanced parentheses in {text!r}")
        try:
            v = tuple(int(x) for x in text[1:-1].split(","))
        except ValueError as exc:
            raise InputError(f"bad coordinate tuple {text!r}") from exc
        if len(v) != n:
            raise InputError(f"vector {text} has length {len(v)}, expected {n}")
        if any(not 0 <= x < F.q for x in v):
            raise InputError(f"vector {text} has entries outside F_{F.q}")
        return v
    v = [0] * n
    for term in text.split("+"):
        m = _TERM.match(term)
        if not m:
            raise InputError(f"cannot parse term {term!r} in {text!r}")
        coef = int(m.group(1)) if m.group(1) else 1
        i = int(m.group(2))
        if not 1 <= i <= n:
            raise InputError(f"index e{i} out of range 1..{n}")
        if not 0 <= coef < F.q:
            raise InputError(f"coefficient {coef} outside F_{F.q}")
        v[i - 1] = F.add(v[i - 1], coef)
    return tuple(v)


def parse_subspace_selector(text: str, n: int, F: FieldCtx) -> Subspace:
    """'e2+e3', '(1,0,1,1)', 'e2,e4' or '0' (the zero space)."""
    text = (text or "").strip()
    if text == "0":
        return zero_space(F, n)
    if not text:
        raise InputError("empty subspace selector; write '0' for the zero space")
    return span([parse_vector(p, n, F) for p in _split_top(text)], n, F)


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

_FLAT_LIST = re.compile(r"\[\s*(-?\d+(?:,\s*-?\d+)*)\s*\]")


def _collapse(text: str) -> str:
    """Put lists of plain integers on one line."""
    return _FLAT_LIST.sub(lambda m: "[" + ", ".join(x.strip() for x in m.group(1).split(",")) + "]", text)


def _dec(x) -> str:
    return f"{float(x):.6f}"


def render_csv(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def emit(args, payload, csv_table=None):
    if args.format == "csv":
        if csv_table is None:
            raise InputError(f"command {args.command!r} has no CSV form; use --format json")
        text = render_csv(*csv_table)
    else:
        text = _collapse(json.dumps(to_jsonable(payload), indent=2)) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _entropy_cells(h: leakage.Entropy):
    exact = h.exact_bits()
    if exact is not None:
        return [_dec(exact), exact.numerator, exact.denominator, "bits"]
    return [f"{h.bits:.6f}", h.logq.numerator, h.logq.denominator, f"logq(q={h.q})"]


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _load(args):
    if not args.code:
        raise InputError("--code is required")
    return load_code(args.code)


def _port_spaces(args, C):
    F, n = C.field, C.n
    if not args.p0:
        raise InputError("--p0 is required")
    P0 = parse_subspace_selector(args.p0, n, F)
    P = parse_subspace_selector(args.p, n, F) if args.p else quotient(P0).section()
    return P0, P


def cmd_rank_table(args):
    loaded = _load(args)
    M = from_code(loaded.matrix, args.budget_subspaces)
    rows = [{"subspace": V, "dim": V.dim, "rank": M.rank(V)} for V in M.subspaces()]
    table = (
        ["subspace", "dim", "rank", "rank_num", "rank_den"],
        [[repr(r["subspace"]), r["dim"], _dec(r["rank"]), r["rank"].numerator, r["rank"].denominator] for r in rows],
    )
    emit(args, {"code": loaded.name, "n": M.n, "m": loaded.matrix.m, "q": M.field.q, "rows": rows}, table)
    return EXIT_OK


def cmd_port(args):
    loaded = _load(args)
    C = loaded.matrix
    M = from_code(C, args.budget_subspaces)
    P0, P = _port_spaces(args, C)
    spec = access.Port(M, P0, P)
    S = access.port(spec)
    pred = access.predicates(S)
    gm = [S.to_world(V) for V in access.gamma_min(S)]
    am = [S.to_world(V) for V in access.privacy_max(S)]
    payload = {
        "code": loaded.name,
        "P0": P0,
        "P": P,
        "ambient_dim": S.dim,
        "gamma_min": sorted(gm, key=Subspace.sort_key),
        "privacy_max": sorted(am, key=Subspace.sort_key),
        "flags": {
            "perfect": pred.is_perfect,
            "degenerate": pred.is_degenerate,
            "connected": pred.is_connected,
            "min_gap": pred.min_gap,
            "threshold": pred.threshold,
            "ideal": access.is_ideal(spec),
            "q_matroid": M.is_q_matroid(),
        },
        "information_ratio": rational_json(access.information_ratio(spec), "ratio"),
        "secret_rank": rational_json(M.rank(P0), "rank"),
    }
    if args.full:
        payload["gamma"] = sorted((S.to_world(V) for V in S.gamma), key=Subspace.sort_key)
        payload["privacy"] = sorted((S.to_world(V) for V in S.privacy), key=Subspace.sort_key)
    rows = [["gamma_min", repr(V), V.dim] for V in payload["gamma_min"]]
    rows += [["privacy_max", repr(V), V.dim] for V in payload["privacy_max"]]
    emit(args, payload, (["part", "subspace", "dim"], rows))
    return EXIT_OK


def _pair(args, loaded):
    C1 = loaded.matrix
    P0, _ = _port_spaces(args, C1)
    if args.c2:
        C2 = load_code(args.c2).matrix
        return leakage.NestedPair(C1, C2), None
    return leakage.NestedPair.from_port(C1, P0), P0


def cmd_leakage(args):
    loaded = _load(args)
    pair, P0 = _pair(args, loaded)
    F, n = pair.field, pair.n
    if args.sweep:
        spaces = lattice(F, n, args.budget_subspaces)
    elif args.obs:
        spaces = [parse_subspace_selector(args.obs, n, F)]
    else:
        raise InputError("give --obs SELECTOR or --sweep")
    rows = []
    for V in spaces:
        obs = leakage.Observation.from_subspace(V)
        leak = leakage.leakage_martinez(pair, obs)
        rows.append({
            "rowspace": V,
            "dim": V.dim,
            "leakage_logq_units": leak,
            "cond_entropy": leakage.Entropy(pair.ell - leak, F.q),
        })
    payload = {"code": loaded.name, "ell": pair.ell, "q": F.q, "m": pair.m, "rows": rows}
    table = (
        ["rowspace", "dim", "leakage_logq", "H_x_given_BC", "H_num", "H_den", "H_unit"],
        [[repr(r["rowspace"]), r["dim"], r["leakage_logq_units"], *_entropy_cells(r["cond_entropy"])] for r in rows],
    )
    emit(args, payload, table)
    return EXIT_OK


def cmd_entropy(args):
    loaded = _load(args)
    C = loaded.matrix
    F, n = C.field, C.n
    payload = {"code": loaded.name}
    rows = []
    if args.v:
        Vs = [parse_subspace_selector(s, n, F) for s in args.v]
        rep = leakage.entropy_Z(C, Vs, args.budget_codewords)
        payload["quotient_entropies"] = {
            "subspaces": Vs,
            "marginals": rep.marginals,
            "joint": rep.joint,
            "joint_of_sum": rep.joint_of_sum,
            "identities_hold": rep.ok,
        }
        for V, h in zip(Vs, rep.marginals):
            rows.append(["H(Z_V)", repr(V), *_entropy_cells(h)])
        rows.append(["joint", ";".join(repr(V) for V in Vs), *_entropy_cells(rep.joint)])
        if not rep.ok:
            raise VerificationFailure("entropy-thm", {"subspaces": Vs, "failures": rep.failures})
    if args.obs:
        pair, P0 = _pair(args, loaded)
        V = parse_subspace_selector(args.obs, n, F)
        obs = leakage.Observation.from_subspace(V)
        routes = {
            "direct": leakage.cond_entropy_direct(pair, obs, args.budget_codewords),
            "padded": leakage.cond_entropy_padded(pair, obs),
            "dual_dimension": leakage.cond_entropy_martinez(pair, obs),
        }
        if P0 is not None:
            routes["port"] = leakage.cond_entropy_port(pair.C1, P0, obs)
        payload["observation"] = V
        payload["cond_entropy"] = routes
        for k, h in routes.items():
            rows.append([k, repr(V), *_entropy_cells(h)])
        if args.samples:
            est = leakage.monte_carlo_entropy(pair, obs, args.samples, args.seed)
            payload["monte_carlo"] = {
                "bits": round(est.bits, 6),
                "bias_bound_bits": round(est.bias_bound, 6),
                "samples": est.samples,
                "seed": est.seed,
            }
            rows.append(["monte_carlo", repr(V), f"{est.bits:.6f}", "", "", "bits"])
        if len(set(routes.values())) != 1:
            raise VerificationFailure("leakage-thm", {"observation": V, "routes": routes})
    if not args.v and not args.obs:
        raise InputError("give --v SELECTOR (repeatable) and/or --obs SELECTOR with --p0")
    emit(args, payload, (["quantity", "subspace", "value", "num", "den", "unit"], rows))
    return EXIT_OK


def cmd_minimal(args):
    loaded = _load(args)
    V = loaded.vector
    if V is None:
        raise InputError("minimal needs a vector code (kind 'vector')")
    target = V.dual() if args.dual else V
    rep = minimal.minimal_codewords(target, args.budget_codewords)
    payload = {
        "code": loaded.name,
        "of": "dual" if args.dual else "code",
        "classes": rep.classes,
        "is_minimal_code": rep.is_minimal_code,
        "minimal": [{"word": list(w), "support": rep.supports[w]} for w in rep.minimal],
    }
    rows = [["minimal", " ".join(map(str, w)), repr(rep.supports[w])] for w in rep.minimal]
    if args.p0:
        P0, P = _port_spaces(args, loaded.matrix)
        report = minimal.check_massey(V, P0, P, args.budget_codewords)
        payload["massey"] = report.details
        payload["massey"]["passed"] = report.passed
        rows += [["image", "", repr(S)] for S in report.details["image"]]
        rows += [["gamma_min", "", repr(S)] for S in report.details["gamma_min"]]
    emit(args, payload, (["kind", "word", "support"], rows))
    return EXIT_OK


def cmd_gabidulin(args):
    base = GF(args.base_p)
    big = GF(args.base_p, args.m)
    ext = ExtBasis(big, base)
    G = gabidulin(args.n, args.k, ext)
    C = expand(G)
    d = min_rank_distance(C, args.budget_codewords)
    payload = {
        "code": code_to_json(G),
        "matrix_dim": C.dim,
        "min_rank_distance": d,
        "mrd": is_mrd(C, args.budget_codewords),
    }
    emit(args, payload, (["n", "k", "m", "q", "dim", "d", "mrd"], [[args.n, args.k, args.m, args.base_p, C.dim, d, payload["mrd"]]]))
    return EXIT_OK


def cmd_verify(args):
    code_json = None
    if args.code:
        loaded = load_code(args.code)
        code_json = code_to_json(loaded.vector if loaded.vector is not None else loaded.matrix)
    suites = SUITES if args.suite == "all" else [args.suite]
    results = [run_suite(s, args.seed, args.count, code_json, args.jobs) for s in suites]
    rows = [[r["suite"], r["seed"], r["count"], r["checked"], r["skipped"], r["passed"]] for r in results]
    emit(args, results if len(results) > 1 else results[0], (["suite", "seed", "count", "checked", "skipped", "passed"], rows))
    failed = [r for r in results if not r["passed"]]
    if failed:
        r = failed[0]
        raise VerificationFailure(r["suite"], r["failures"][0])
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def _positive(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--code", help="code JSON file or bundled fixture name (example421, example424)")
    common.add_argument("--budget-subspaces", type=_positive, default=None)
    common.add_argument("--budget-codewords", type=_positive, default=None)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write output here instead of stdout")

    port_opts = argparse.ArgumentParser(add_help=False)
    port_opts.add_argument("--p0", help="secret space selector, e.g. 'e1'")
    port_opts.add_argument("--p", help="complement selector, e.g. 'e2,e3,e4' (default: coordinate complement)")
    port_opts.add_argument("--c2", help="inner code file for an explicit nested pair")

    parser = argparse.ArgumentParser(prog="qleak", description="Leakage analysis of nested rank-metric coset codes.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("rank-table", parents=[common], help="rank of every subspace")

    p = sub.add_parser("port", parents=[common, port_opts], help="access structure of a port")
    p.add_argument("--full", action="store_true", help="also dump the full gamma and privacy sets")

    p = sub.add_parser("leakage", parents=[common, port_opts], help="leakage per observation row space")
    p.add_argument("--obs", help="observation row space selector")
    p.add_argument("--sweep", action="store_true", help="every row space of F_q^n")

    p = sub.add_parser("entropy", parents=[common, port_opts], help="exact and sampled entropies")
    p.add_argument("--obs", help="observation row space selector")
    p.add_argument("--v", action="append", help="subspace for the quotient entropies (repeatable)")
    p.add_argument("--samples", type=_positive, default=None)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("minimal", parents=[common, port_opts], help="minimal codewords and the dual image")
    p.add_argument("--dual", action="store_true", help="report on the dual code")

    p = sub.add_parser("gabidulin", parents=[common], help="build a Gabidulin code")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--base-p", type=int, default=2)

    p = sub.add_parser("verify", parents=[common], help="run a theorem-check suite")
    p.add_argument("--suite", choices=SUITES + ("all",), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=_positive, default=None)
    p.add_argument("--jobs", type=_positive, default=1)
    return parser


COMMANDS = {
    "rank-table": cmd_rank_table,
    "port": cmd_port,
    "leakage": cmd_leakage,
    "entropy": cmd_entropy,
    "minimal": cmd_minimal,
    "gabidulin": cmd_gabidulin,
    "verify": cmd_verify,
}


@contextmanager
def _budget_env(args):
    saved = {}
    pairs = {
        "QLEAK_BUDGET_SUBSPACES": args.budget_subspaces,
        "QLEAK_BUDGET_CODEWORDS": args.budget_codewords,
    }
    for key, value in pairs.items():
        if value is not None:
            saved[key] = os.environ.get(key)
            os.environ[key] = str(value)
    try:
        yield
    finally:
        for key, old in saved.items():
            if old is None:
                os.environ.pop(key, None)
            else:
                os.environ[key] = old


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with _budget_env(args):
            return COMMANDS[args.command](args)
    except VerificationFailure as exc:
        print(f"qleak: verification failed in suite {exc.suite}", file=sys.stderr)
        print(json.dumps(to_jsonable(exc.counterexample), sort_keys=True), file=sys.stderr)
        return EXIT_VERIFY
    except BudgetExceeded as exc:
        print(f"qleak: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, FieldError, OSError) as exc:
        print(f"qleak: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
