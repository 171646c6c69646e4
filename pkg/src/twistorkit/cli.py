"""``twistorkit <command> --config <path> [--out <path>] [--format json|csv]``.

Exit codes: 0 success (including negative verdicts), 1 configuration or
usage error, 2 error reported by a computation module or an unwritable
output path.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable, Sequence

from . import bundles, glt, lie, monopole, quotients
from .serialize import flatten, to_csv_bytes, to_json_bytes

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2


class ConfigError(Exception):
    pass


# errors a module raises on valid-looking input it cannot process
DOMAIN_ERRORS = (
    bundles.InvalidTransitionError,
    bundles.EmbeddingError,
    lie.InvalidAlgebraError,
    lie.BCHError,
    lie.StratificationError,
    glt.GLTError,
    monopole.ChartError,
    quotients.QuotientError,
)


class Report:
    """Report body plus an optional table for CSV output."""

    def __init__(self, body: dict, columns: Sequence[str] | None = None, rows: list | None = None):
        self.body = body
        self.columns = columns
        self.rows = rows

    def render(self, fmt: str) -> bytes:
        if fmt == "json":
            return to_json_bytes(self.body)
        if self.columns is not None:
            return to_csv_bytes(self.columns, self.rows or [])
        return to_csv_bytes(("key", "value"), flatten(self.body))


def _cplx(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex value must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(v)


def _require(payload: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in payload]
    if missing:
        raise ConfigError(f"config is missing field(s): {', '.join(missing)}")


# --- commands ------------------------------------------------------------------


def cmd_bundle_split(payload: dict, args) -> Report:
    if "diagonal" in payload:
        E = bundles.BundleOnP1.diagonal([int(a) for a in payload["diagonal"]])
    else:
        _require(payload, "transition")
        E = bundles.BundleOnP1.from_json(payload["transition"])
    split = bundles.splitting_type(E)
    return Report({
        "splitting": list(split),
        "rank": E.rank,
        "degree": E.degree,
        "h0": bundles.bundle_h0(E),
        "degree_check": sum(split) == E.degree,
        "tolerances": {"rank": bundles.RANK_TOL},
    })


def cmd_lie_validate(payload: dict, args) -> Report:
    body: dict[str, Any] = {"tolerances": {"rank": lie.RANK_TOL, "coefficient": lie.COEFF_TOL}}
    if "unipotent_family" in payload:
        g = payload["unipotent_family"]
        if g not in lie.GROUPS:
            raise ConfigError(f"unknown group {g!r}; expected one of {sorted(lie.GROUPS)}")
        directions = payload.get("directions", [[0.0, 0.0, 1.0]])
        dims = [lie.unipotent_family(g, d).fiber_dim for d in directions]
        body["unipotent_family"] = {
            "group": g,
            "fiber_dims": dims,
            "splitting": list(bundles.splitting_type(lie.family_bundle(g))),
        }
        if "algebra" not in payload:
            return Report(body)
    algebra = payload.get("algebra", payload)
    _require(algebra, "splitting")
    L = lie.TwistorLieAlgebra.from_json(algebra)
    report = lie.validate(L)
    body["validation"] = report.to_json()
    body["verdict"] = "valid" if report.valid else "invalid"
    if report.valid:
        nil = lie.nilpotency(L, check=False)
        body["nilpotency"] = {"is_negative": nil.is_negative, "class": nil.label,
                              "lower_central_dims": list(nil.dims)}
        neg = lie.maximal_negative_subalgebra(L)
        body["negative_part"] = {"indices": list(neg.indices), "closed": neg.closed,
                                 "splitting": list(neg.algebra.splitting)}
        if not neg.closed:
            body["negative_part"]["message"] = neg.message
    return Report(body)


def cmd_quotient_check(payload: dict, args) -> Report:
    _require(payload, "n", "lieG")
    s = quotients.QuotientScenario.from_json(payload)
    body: dict[str, Any] = {"action": quotients.check_action_constraints(s).to_json()}
    if s.embedding is not None:
        adm = quotients.admissibility_check(s)
        body["admissibility"] = adm.to_json()
        body["verdict"] = adm.verdict
    if s.lie_h is not None:
        m = len(s.lie_h)
        body["quotient_dimension"] = quotients.quotient_dimension(s.n, m)
    return Report(body)


def _problem(payload: dict, args) -> glt.GLTProblem:
    _require(payload, "k", "terms")
    p = glt.GLTProblem.from_json(payload)
    if payload.get("realify"):
        p = p.realified()
    if args.lam and args.command == "glt-run":
        p = p.with_lambda(args.lam[0])
    return p


def _grid(payload: dict, args) -> list[tuple[complex, complex]]:
    if "points" in payload:
        return [(_cplx(z), _cplx(u)) for z, u in payload["points"]]
    grid_cfg = payload.get("grid", {})
    n = args.grid if args.grid is not None else int(grid_cfg.get("n", 5))
    if n < 1:
        raise ConfigError("--grid must be positive")
    return glt.square_grid(_cplx(grid_cfg.get("z", 0.2)), _cplx(grid_cfg.get("u", 0.1)),
                           float(grid_cfg.get("spacing", 0.05)), n)


def cmd_glt_run(payload: dict, args) -> Report:
    p = _problem(payload, args)
    grid = _grid(payload, args)
    res = glt.monge_ampere_residual(p, grid)
    center = res.samples[len(grid) // 2]
    hess = glt.hessian_F(p, center.section)
    points = []
    for (z, u), s in zip(grid, res.samples):
        points.append({"z": z, "u": u, "K": s.K, "determinant": s.determinant,
                       "metric": s.metric, "symmetry_defect": s.symmetry_defect})
    return Report({
        "problem": p.to_json(),
        "points": points,
        "monge_ampere_residual": res.residual,
        "monge_ampere_constant": res.constant,
        "pde_residual_at_center": hess.pde_residual,
        "verdict": "pass" if res.residual <= 1e-4 else "fail",
        "tolerances": {"monge_ampere": 1e-4, "quadrature": glt.QUAD_TOL, "newton": glt.NEWTON_TOL,
                       "reality": glt.REALITY_TOL, "fd_step": glt.FD_STEP},
    })


def cmd_glt_sweep(payload: dict, args) -> Report:
    p = _problem(payload, args)
    grid = _grid(payload, args)
    lambdas = args.lam if args.lam else [tuple(v) for v in payload.get("lambdas", [])]
    rows = glt.deformation_sweep(p, lambdas, grid)
    table = []
    for r in rows:
        g = r.metric_center or (None,) * 6
        table.append([list(r.lam), r.residual, r.determinant, *g, r.error])
    return Report(
        {
            "problem": p.to_json(),
            "rows": [dict(zip(glt.SWEEP_COLUMNS, row)) for row in table],
            "lambda_dimension": glt.lambda_dimension(p.k),
            "verdict": "pass" if all(r.ok and r.residual <= 1e-4 for r in rows) else "fail",
            "tolerances": {"monge_ampere": 1e-4, "quadrature": glt.QUAD_TOL, "newton": glt.NEWTON_TOL},
        },
        glt.SWEEP_COLUMNS,
        table,
    )


ORBIT_COLUMNS = ("lambda", "a", "b", "c", "constraint_residual", "scaling_residual",
                 "moment", "stabilizes", "symplectic_residual")


def cmd_ah_orbit(payload: dict, args) -> Report:
    _require(payload, "point")
    pt = payload["point"]
    if "b" in pt:
        m = monopole.RationalMapPoint(_cplx(pt["a"]), _cplx(pt["b"]), _cplx(pt["c"]))
    else:
        m = monopole.RationalMapPoint.from_ac(_cplx(pt["a"]), _cplx(pt["c"]))
    if args.lam:
        lams = [complex(*v) if len(v) == 2 else complex(v[0]) for v in args.lam]
    else:
        lams = [_cplx(v) for v in payload.get("lambdas", [])]
    h = float(payload.get("h", 1e-4))
    table = []
    for row in monopole.orbit_table(m, lams):
        symp = monopole.symplectic_residual(row.lam, m, h)
        table.append([row.lam, row.point.a, row.point.b, row.point.c, row.constraint_residual,
                      row.scaling_residual, row.moment, row.stabilizes, symp])
    return Report(
        {
            "point": m.to_json(),
            "moment": monopole.moment_value(m),
            "rows": [dict(zip(ORBIT_COLUMNS, row)) for row in table],
            "tolerances": {"constraint": monopole.CONSTRAINT_TOL,
                           "stabilizer": monopole.STABILIZER_TOL, "fd_step": h},
        },
        ORBIT_COLUMNS,
        table,
    )


COMMANDS: dict[str, Callable[[dict, argparse.Namespace], Report]] = {
    "bundle-split": cmd_bundle_split,
    "lie-validate": cmd_lie_validate,
    "quotient-check": cmd_quotient_check,
    "glt-run": cmd_glt_run,
    "glt-sweep": cmd_glt_sweep,
    "ah-orbit": cmd_ah_orbit,
}


# --- entry point ---------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _lambda_arg(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid lambda vector {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="twistorkit", description="Twistor-theoretic computations from JSON configs.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="JSON config file")
    ap.add_argument("--out", help="output path (default: stdout)")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--grid", type=int, help="grid size n for an n x n (z, u) grid")
    ap.add_argument("--lambda", dest="lam", type=_lambda_arg, action="append",
                    help="comma-separated lambda vector; repeat for sweeps")
    return ap


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        if not isinstance(payload, dict):
            raise ConfigError("config must be a JSON object")
        report = COMMANDS[args.command](payload, args)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"twistorkit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DOMAIN_ERRORS as exc:
        print(f"twistorkit: {args.command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (KeyError, TypeError, ValueError) as exc:
        # schema problems surface as these while parsing the payload
        print(f"twistorkit: config error: {exc!r}", file=sys.stderr)
        return EXIT_CONFIG

    report.body["input"] = payload
    report.body["command"] = args.command
    data = report.render(args.format)
    if args.out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return EXIT_OK
    try:
        with open(args.out, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        print(f"twistorkit: cannot write report: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
