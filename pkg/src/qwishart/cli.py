"""Command-line front end: deterministic JSON/CSV output, inline or @file args.

Exit codes: 0 success, 2 input validation failure (the message names the
offending flag), 1 internal assertion failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import fluctuations, moments, montecarlo, mp, pairings
from .polynomials import (
    MomentPolynomial,
    poly_from_json,
    poly_to_json,
    rational_to_str,
)


class CliInputError(Exception):
    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field


def _load(field: str, value: str) -> str:
    if value.startswith("@"):
        try:
            with open(value[1:], "r", encoding="utf-8") as handle:
                return handle.read()
        except OSError as exc:
            raise CliInputError(field, f"cannot read {value[1:]}: {exc}") from exc
    return value


def _parse_json(field: str, value: str):
    try:
        return json.loads(_load(field, value))
    except json.JSONDecodeError as exc:
        raise CliInputError(field, f"invalid JSON: {exc}") from exc


def _parse_spec(field: str, value: str) -> moments.MonomialSpec:
    data = _parse_json(field, value)
    if isinstance(data, dict):
        words = data.get("cycle_words")
    else:
        words = data
    try:
        return moments.MonomialSpec.from_words(words)
    except (TypeError, ValueError) as exc:
        raise CliInputError(field, str(exc)) from exc


def _parse_pairing(field: str, value: str) -> pairings.PairPartition:
    data = _parse_json(field, value)
    try:
        return pairings.PairPartition.from_pairs(data)
    except (TypeError, ValueError) as exc:
        raise CliInputError(field, str(exc)) from exc


def _parse_coloring(field: str, value: str) -> pairings.Coloring:
    raw = _load(field, value)
    try:
        if raw.lstrip().startswith("["):
            colors = json.loads(raw)
        else:
            colors = [int(x) for x in raw.split(",")]
        return pairings.Coloring.from_colors(colors)
    except (TypeError, ValueError) as exc:
        raise CliInputError(field, str(exc)) from exc


def _entry_from_json(field: str, value):
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise CliInputError(field, f"bad rational {value!r}") from exc
    if isinstance(value, bool) or value is None:
        raise CliInputError(field, f"bad numeric entry {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    return float(value)


def _parse_matrices(field: str, value: str) -> moments.MatrixBindings:
    data = _parse_json(field, value)
    if isinstance(data, dict):
        data = [data]
    pairs = []
    try:
        for color in data:
            b = [[_entry_from_json(field, x) for x in row] for row in color["B"]]
            sigma = [[_entry_from_json(field, x) for x in row] for row in color["Sigma"]]
            pairs.append((b, sigma))
        return moments.MatrixBindings.numeric(pairs)
    except CliInputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CliInputError(field, str(exc)) from exc


def _parse_scalar(field: str, value: str) -> moments.MatrixBindings:
    data = _parse_json(field, value)
    try:
        sizes = [x if isinstance(x, str) else int(x) for x in data["M"]]
        factors = []
        for entry in data.get("scale", ["1"] * len(sizes)):
            if isinstance(entry, dict):
                factors.append(poly_from_json(entry["poly"]))
            else:
                factors.append(_entry_from_json(field, entry))
        n_dim = data.get("N", "N")
        if not isinstance(n_dim, (str, int)):
            raise ValueError("N must be a symbol or an integer")
        return moments.MatrixBindings.scalar(sizes, factors, n_dim)
    except CliInputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CliInputError(field, str(exc)) from exc


def _parse_statistic(field: str, value: str) -> fluctuations.PolynomialStatistic:
    data = _parse_json(field, value)
    try:
        terms = []
        for term in data["terms"]:
            coeff = term["coeff"]
            if isinstance(coeff, dict):
                coeff = poly_from_json(coeff["poly"])
            else:
                coeff = Fraction(coeff)
            terms.append((coeff, tuple(int(c) for c in term["word"])))
        return fluctuations.PolynomialStatistic.from_terms(terms)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliInputError(field, str(exc)) from exc


def _parse_q(field: str, value: str):
    if value in ("sym", "q"):
        return "q"
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliInputError(field, f"bad q value {value!r}") from exc


def _result_json(result):
    if isinstance(result, MomentPolynomial):
        return poly_to_json(result)
    if isinstance(result, (int, Fraction)):
        return rational_to_str(result)
    return result


def _poly_csv_rows(poly: MomentPolynomial, prefix: list[str]) -> tuple[list[str], list[list[str]]]:
    data = poly_to_json(poly)
    symbols: list[str] = []
    for term in data["terms"]:
        for key in term["powers"]:
            if key != "atoms" and key not in symbols:
                symbols.append(key)
    header = prefix + ["coeff"] + symbols + ["atoms"]
    rows = []
    for term in data["terms"]:
        atoms = term["powers"].get("atoms", [])
        atom_text = " ".join(
            _atom_str(a["kind"], a["word"]) + (f"^{a['power']}" if a["power"] != 1 else "")
            for a in atoms
        )
        rows.append(
            [term["coeff"]]
            + [str(term["powers"].get(sym, 0)) for sym in symbols]
            + [atom_text]
        )
    return header, rows


def _atom_str(kind: str, word) -> str:
    letter = "B" if kind == "shape" else "S"
    return "tr(" + " ".join(f"{letter}{c}" + ("'" if t else "") for c, t in word) + ")"


def _emit_csv(out, header, rows) -> None:
    import csv

    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)


def _emit_json(out, payload) -> None:
    json.dump(payload, out, separators=(",", ":"))
    out.write("\n")


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_enumerate(args, out) -> int:
    try:
        if args.coloring is not None:
            coloring = _parse_coloring("--coloring", args.coloring)
            if coloring.n != args.n:
                raise CliInputError("--coloring", "coloring length must equal --n")
            stream = pairings.color_preserving_pairings(
                coloring, allow_large=args.allow_large_n
            )
            colors = list(coloring.colors)
        else:
            stream = pairings.all_pairings(args.n, allow_large=args.allow_large_n)
            colors = None
        items = [[list(pair) for pair in pp.pairs()] for pp in stream]
    except ValueError as exc:
        raise CliInputError("--n", str(exc)) from exc
    _emit_json(out, {"n": args.n, "coloring": colors, "count": len(items), "pairings": items})
    return 0


def _moment_common(args, q, out) -> int:
    symbolic = bool(args.symbolic)
    chosen = [x for x in (args.matrices, args.scalar) if x is not None]
    if len(chosen) + (1 if symbolic else 0) != 1:
        raise CliInputError(
            "--symbolic", "choose exactly one of --symbolic, --matrices, --scalar"
        )
    bindings = None
    mode = "symbolic"
    if args.matrices is not None:
        bindings = _parse_matrices("--matrices", args.matrices)
        mode = "numeric"
    elif args.scalar is not None:
        bindings = _parse_scalar("--scalar", args.scalar)
        mode = "scalar"

    if getattr(args, "sigma", None) is not None:
        if args.spec is not None:
            raise CliInputError("--sigma", "give either --spec or --sigma, not both")
        if args.coloring is None:
            raise CliInputError("--coloring", "--sigma requires --coloring")
        sigma = _parse_pairing("--sigma", args.sigma)
        coloring = _parse_coloring("--coloring", args.coloring)
        try:
            result = moments.real_wishart_moment_general(
                sigma, coloring, bindings,
                allow_large=args.allow_large_n, threads=args.threads,
            )
        except ValueError as exc:
            raise CliInputError("--sigma", str(exc)) from exc
        echo = {
            "sigma": [list(p) for p in sigma.pairs()],
            "coloring": list(coloring.colors),
        }
    else:
        if args.spec is None:
            raise CliInputError("--spec", "a spec is required")
        spec = _parse_spec("--spec", args.spec)
        try:
            if q is None:
                result = moments.real_wishart_moment(
                    spec, bindings, allow_large=args.allow_large_n, threads=args.threads
                )
            else:
                result = moments.q_wishart_moment(
                    spec, bindings, q,
                    allow_large=args.allow_large_n, threads=args.threads,
                )
        except ValueError as exc:
            raise CliInputError("--spec", str(exc)) from exc
        echo = {"spec": {"cycle_words": [list(w) for w in spec.cycle_words]}}

    if args.format == "csv":
        if not isinstance(result, MomentPolynomial):
            _emit_csv(out, ["value"], [[str(result)]])
        else:
            header, rows = _poly_csv_rows(result, [])
            _emit_csv(out, header, rows)
        return 0
    payload = dict(echo)
    payload["mode"] = mode
    if q is not None:
        payload["q"] = "sym" if isinstance(q, str) else rational_to_str(q)
    payload["result"] = _result_json(result)
    _emit_json(out, payload)
    return 0


def _cmd_moment(args, out) -> int:
    return _moment_common(args, None, out)


def _cmd_q_moment(args, out) -> int:
    q = _parse_q("--q", args.q)
    return _moment_common(args, q, out)


def _cmd_fluctuation_limit(args, out) -> int:
    statistic = _parse_statistic("--Q", args.Q)
    q = _parse_q("--q", args.q)
    if args.orders < 1:
        raise CliInputError("--orders", "orders must be at least 1")
    try:
        limits = fluctuations.statistic_limit_moments(statistic, args.orders, q)
    except ValueError as exc:
        raise CliInputError("--orders", str(exc)) from exc
    if args.format == "csv":
        header = None
        rows = []
        for m, lm in enumerate(limits, start=1):
            h, r = _poly_csv_rows(lm.value, ["order"])
            header = header or h
            rows.extend([[str(m)] + row for row in r])
        _emit_csv(out, header or ["order", "coeff", "atoms"], rows)
        return 0
    payload = {
        "q": "sym" if isinstance(q, str) else rational_to_str(q),
        "orders": [
            {"order": m, "value": poly_to_json(lm.value)}
            for m, lm in enumerate(limits, start=1)
        ],
    }
    _emit_json(out, payload)
    return 0


def _cmd_t5_check(args, out) -> int:
    statistic = _parse_statistic("--Q", args.Q)
    q = _parse_q("--q", args.q)
    if args.m < 0:
        raise CliInputError("--m", "m must be nonnegative")
    try:
        diff = fluctuations.conditional_variance_check(statistic, args.m, q)
    except ValueError as exc:
        raise CliInputError("--m", str(exc)) from exc
    if args.format == "csv":
        header, rows = _poly_csv_rows(diff, [])
        _emit_csv(out, header, rows)
        return 0
    _emit_json(out, {"m": args.m, "difference": poly_to_json(diff), "zero": diff.is_zero()})
    return 0


def _cmd_mp_check(args, out) -> int:
    if args.input is not None:
        data = _parse_json("--input", args.input)
        eigenvalues = data.get("eigenvalues")
        scale_dim = data.get("N")
        n_max = data.get("n_max")
    else:
        if args.eigenvalues is None or args.N is None or args.n_max is None:
            raise CliInputError(
                "--eigenvalues", "need --eigenvalues, --N and --n-max (or --input)"
            )
        eigenvalues = _parse_json("--eigenvalues", args.eigenvalues)
        scale_dim = args.N
        n_max = args.n_max
    try:
        eigs = [Fraction(x) for x in eigenvalues]
        report = mp.mp_moment_check(eigs, int(scale_dim), int(n_max))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise CliInputError("--eigenvalues", str(exc)) from exc
    payload = {
        "lambda": rational_to_str(report.aspect_ratio),
        "rows": [
            {
                "n": row.n,
                "lhs": rational_to_str(row.lhs),
                "rhs": rational_to_str(row.rhs),
                "equal": row.equal,
            }
            for row in report.rows
        ],
        "all_equal": report.all_equal,
    }
    _emit_json(out, payload)
    return 0


def _cmd_mc_validate(args, out) -> int:
    if args.config is not None:
        data = _parse_json("--config", args.config)
        seed = data.get("seed", args.seed)
        samples = data.get("samples", args.samples)
        matrices = json.dumps(data.get("matrices"))
        spec_text = json.dumps(data.get("spec"))
    else:
        if args.spec is None or args.matrices is None:
            raise CliInputError("--spec", "need --spec and --matrices (or --config)")
        seed, samples = args.seed, args.samples
        matrices, spec_text = args.matrices, args.spec
    spec = _parse_spec("--spec", spec_text)
    bindings = _parse_matrices("--matrices", matrices)
    try:
        config = montecarlo.SamplerConfig(
            seed=int(seed),
            samples=int(samples),
            colors=tuple(
                (
                    [[float(x) for x in row] for row in b],
                    [[float(x) for x in row] for row in sigma],
                )
                for b, sigma in zip(bindings.shapes, bindings.scales)
            ),
            partitions=args.partitions,
        )
        report = montecarlo.estimate_monomial(spec, config)
    except (TypeError, ValueError) as exc:
        raise CliInputError("--matrices", str(exc)) from exc
    payload = {
        "spec": {"cycle_words": [list(w) for w in spec.cycle_words]},
        "seed": int(seed),
        "samples": int(samples),
        "mean": report.mean,
        "stderr": report.stderr,
        "exact": report.exact,
        "z": report.z,
    }
    _emit_json(out, payload)
    return 0


def _cmd_table1(args, out) -> int:
    spec = moments.MonomialSpec(((1, 2), (1, 2)))
    coloring = spec.coloring()
    sigma = spec.pairing()
    payload_rows = []
    for gamma in pairings.color_preserving_pairings(coloring):
        product = pairings.brauer(sigma, gamma)
        induced = pairings.induced_coloring(sigma, gamma, coloring)
        term = _single_pairing_contribution(sigma, coloring, gamma)
        payload_rows.append(
            {
                "gamma": [list(p) for p in gamma.pairs()],
                "cr": pairings.crossings(gamma),
                "pi_gamma": [list(c) for c in pairings.traverse(gamma).cycles()],
                "pi_sigma_gamma": [list(c) for c in pairings.traverse(product).cycles()],
                "induced_coloring": list(induced.colors),
                "contribution": poly_to_json(term),
            }
        )
    _emit_json(out, {"rows": payload_rows})
    return 0


def _single_pairing_contribution(sigma, coloring, gamma) -> MomentPolynomial:
    from .polynomials import TraceAtom

    trav = pairings.traverse(gamma)
    powers: dict = {}
    for cyc in trav.cycles():
        word = tuple((coloring.colors[j - 1], trav.signs[j - 1] == 1) for j in cyc)
        atom = TraceAtom.make("shape", word)
        powers[atom] = powers.get(atom, 0) + 1
    product = pairings.brauer(sigma, gamma)
    induced = pairings.induced_coloring(sigma, gamma, coloring)
    for cyc in pairings.traverse(product).cycles():
        word = tuple((induced.colors[j - 1], False) for j in cyc)
        atom = TraceAtom.make("scale", word)
        powers[atom] = powers.get(atom, 0) + 1
    return MomentPolynomial.monomial(1, powers)


# ---------------------------------------------------------------------------
# parser and dispatch


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwishart",
        description="Exact trace moments of compound real Wishart and q-Wishart families",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_q=False, with_sigma=False):
        p.add_argument("--spec", help="monomial spec JSON, or @file")
        if with_sigma:
            p.add_argument("--sigma", help="top-to-bottom pairing JSON, or @file")
        p.add_argument("--coloring", help="coloring as JSON list or comma list")
        p.add_argument("--matrices", help="per-color {B, Sigma} JSON, or @file")
        p.add_argument("--scalar", help='scalar bindings JSON {"M": [...], "scale": [...]}')
        p.add_argument("--symbolic", action="store_true", help="keep trace atoms symbolic")
        if with_q:
            p.add_argument("--q", default="sym", help="rational q or 'sym'")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--allow-large-n", dest="allow_large_n", action="store_true")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("enumerate", help="list pair partitions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--coloring")
    p.add_argument("--allow-large-n", dest="allow_large_n", action="store_true")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("moment", help="classical Wishart trace moment")
    common(p, with_sigma=True)
    p.set_defaults(func=_cmd_moment)

    p = sub.add_parser("q-moment", help="q-Wishart trace moment")
    common(p, with_q=True)
    p.set_defaults(func=_cmd_q_moment)

    p = sub.add_parser("fluctuation-limit", help="limit moments of a centered statistic")
    p.add_argument("--Q", required=True, help="statistic JSON, or @file")
    p.add_argument("--orders", type=int, required=True)
    p.add_argument("--q", default="sym")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_fluctuation_limit)

    p = sub.add_parser("t5-check", help="conditional-variance identity check")
    p.add_argument("--Q", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--q", default="sym")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_t5_check)

    p = sub.add_parser("mp-check", help="finite-size compound Marchenko-Pastur check")
    p.add_argument("--input", help='JSON {"eigenvalues": [...], "N": n, "n_max": k}')
    p.add_argument("--eigenvalues", help="JSON list of rationals")
    p.add_argument("--N", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.set_defaults(func=_cmd_mp_check)

    p = sub.add_parser("mc-validate", help="Monte Carlo validation of the exact formula")
    p.add_argument("--config", help="JSON {seed, samples, spec, matrices}")
    p.add_argument("--spec")
    p.add_argument("--matrices")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--partitions", type=int, default=1)
    p.set_defaults(func=_cmd_mc_validate)

    p = sub.add_parser("table1", help="two-color squared-trace expansion table")
    p.set_defaults(func=_cmd_table1)

    return parser


def run(argv, out=None) -> int:
    out = out or sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except CliInputError as exc:
        print(f"error: {exc.field}: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:  # internal invariant violation
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
