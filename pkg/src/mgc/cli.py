"""Command-line front end: machine-readable tables for every toolkit quantity.

One executable with subcommands, one seeded generator per invocation, and a
one-shot verification suite.  Output streams as JSON (default) or CSV with
full-precision scientific notation; identical configurations produce
byte-identical output.

Exit codes: 0 ok, 1 check failure, 2 usage error, 3 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import applications as apps
from .bridge import bridge_operator, commutant_dim
from .dense import (
    CapacityError,
    ensure_dense_capacity,
    kron_power,
    random_orthogonal,
    to_dense,
)
from .gt import gt_basis, gt_basis_to_json
from .pairing import (
    InfeasibleConfigError,
    admissible_configs,
    pairing_operator,
    span_rank,
)
from .patterns import (
    cm_basis_float,
    cm_dim,
    cm_twirl,
    cm_twirl_exhaustive,
    enumerate_occupancies,
    pattern_norm_sq,
    pattern_operator,
)
from .strings import (
    OperatorExpansion,
    from_json_dict,
    hs_inner,
    hs_norm,
    op_multiply,
    op_to_float,
    op_trace,
    to_json_dict,
    vacuum_state_operator,
)

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3


class UsageError(ValueError):
    """Malformed flags or input files."""


@lru_cache(maxsize=None)
def _cached_gt_basis(n: int, k: int):
    return gt_basis(n, k)


@dataclass(frozen=True)
class RunConfig:
    """Per-invocation settings shared by every subcommand."""

    n: int = 1
    k: int = 2
    seed: int = 0
    samples: int = 10000
    tolerance: float = 1e-9
    format: str = "json"
    out: str | None = None

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must fit in 64 unsigned bits")
        if self.format not in ("json", "csv"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.samples < 1:
            raise UsageError("samples must be positive")


# ---------------------------------------------------------------------------
# output formatting


def _fmt(value) -> str:
    """Full-precision scientific notation: 17 significant digits."""
    return f"{float(value):.16e}"


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, Fraction)):
        return _fmt(value)
    if isinstance(value, (list, tuple)):
        return " ".join(str(v) for v in value)
    return str(value)


def _rows_to_csv(rows: list) -> str:
    if not rows:
        return "\n"
    header: list = []
    for row in rows:
        for key in row:
            if key not in header:
                header.append(key)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(row[key]) if key in row else "" for key in header))
    return "\n".join(lines) + "\n"


def _operator_rows(data: dict) -> list:
    rows = []
    for term in data["terms"]:
        rows.append(
            {
                "masks": term["masks"],
                "re": float(term["re"]),
                "im": float(term["im"]),
            }
        )
    return rows


def _emit(payload, cfg: RunConfig, csv_rows=None) -> None:
    """Write JSON (pretty, stable key order) or CSV rows to --out or stdout."""
    if cfg.format == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        if csv_rows is None:
            csv_rows = payload if isinstance(payload, list) else [payload]
        text = _rows_to_csv(csv_rows)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# shared helpers


def _parse_range(text: str) -> list:
    """'2' -> [2]; '1..4' -> [1, 2, 3, 4]."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise UsageError(f"bad range {text!r}; use N or LO..HI") from None


def _load_json_file(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _gate_dense(n: int, k: int) -> None:
    ensure_dense_capacity(n, k)


def _gate_gt(k: int) -> None:
    if not 2 <= k <= 5:
        raise UsageError(f"replica count k={k} outside the supported range 2..5")


# ---------------------------------------------------------------------------
# subcommands


def cmd_dim(cfg: RunConfig, n_range: list, k_range: list) -> int:
    rows = []
    for n in n_range:
        for k in k_range:
            mg = commutant_dim(n, k)
            cm = cm_dim(n, k)
            rows.append(
                {
                    "n": n,
                    "k": k,
                    "dim_matchgate": mg,
                    "dim_clifford_matchgate": cm,
                    "equal": mg == cm,
                }
            )
    _emit(rows, cfg)
    return EXIT_OK


def cmd_basis(cfg: RunConfig, which: str) -> int:
    n, k = cfg.n, cfg.k
    if which == "gt":
        _gate_gt(k)
        elements = _cached_gt_basis(n, k)
        ops = [el.operator for el in elements]
        gram = np.array(
            [[complex(hs_inner(a, b)).real for b in ops] for a in ops]
        )
        residual = float(np.max(np.abs(gram - np.eye(len(ops)))))
        payload = {
            "metadata": {
                "which": "gt",
                "n": n,
                "k": k,
                "count": len(ops),
                "gram_identity_residual": residual,
            },
            "elements": gt_basis_to_json(elements),
        }
    elif which == "pairing":
        elements = []
        ops = []
        for weight in _pairing_weights(n, k):
            for config in admissible_configs(weight, k):
                try:
                    op = pairing_operator(config, n)
                except InfeasibleConfigError:
                    continue
                ops.append(op)
                elements.append(
                    {
                        "weight": list(weight),
                        "pair_counts": list(config.upper),
                        "operator": to_json_dict(op),
                    }
                )
        payload = {
            "metadata": {
                "which": "pairing",
                "n": n,
                "k": k,
                "count": len(ops),
                "span_rank": span_rank(ops),
                "commutant_dim": commutant_dim(n, k),
            },
            "elements": elements,
        }
    elif which == "pattern":
        occs = enumerate_occupancies(n, k)
        elements = []
        for occ in occs:
            elements.append(
                {
                    "occupancy": occ.to_json_dict(),
                    "norm_sq": pattern_norm_sq(occ, n),
                    "operator": to_json_dict(pattern_operator(occ, n, normalized=True, exact=False)),
                }
            )
        payload = {
            "metadata": {
                "which": "pattern",
                "n": n,
                "k": k,
                "count": len(occs),
            },
            "elements": elements,
        }
    else:
        raise UsageError(f"unknown basis {which!r}")
    csv_rows = []
    for i, el in enumerate(payload["elements"]):
        for term in el["operator"]["terms"]:
            csv_rows.append(
                {"element": i, "masks": term["masks"], "re": term["re"], "im": term["im"]}
            )
    _emit(payload, cfg, csv_rows=csv_rows)
    return EXIT_OK


def _pairing_weights(n: int, k: int):
    """Row-sum tuples with each entry at most 2n and even total."""
    import itertools

    for weight in itertools.product(range(2 * n + 1), repeat=k):
        if sum(weight) % 2 == 0:
            yield weight


def cmd_twirl(cfg: RunConfig, input_path: str, ensemble: str) -> int:
    data = _load_json_file(input_path)
    try:
        op = from_json_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed operator file: {exc}") from None
    if ensemble == "matchgate":
        _gate_gt(op.k)
        result = apps.matchgate_twirl(op)
    elif ensemble == "clifford_matchgate":
        result = cm_twirl(op_to_float(op))
    else:
        raise UsageError(f"unknown ensemble {ensemble!r}")
    payload = to_json_dict(result)
    _emit(payload, cfg, csv_rows=_operator_rows(payload))
    return EXIT_OK


def cmd_frame_potential(
    cfg: RunConfig, which: str, ensemble: str, mode: str
) -> int:
    n, k = cfg.n, cfg.k
    if which == "unitary":
        value = apps.unitary_frame_potential(
            n, k, mode=mode, samples=cfg.samples, seed=cfg.seed
        )
        ref = {
            "closed": "commutant-dimension",
            "rmt": "orthogonal-eigenangle-integral",
            "mc": "haar-sampling",
        }[mode]
        quantity = "unitary_frame_potential"
    elif which == "state":
        value = apps.state_frame_potential(
            n, k, ensemble=ensemble, mode=mode, samples=cfg.samples, seed=cfg.seed
        )
        ref = {
            "closed": "invariant-sector-trace"
            if ensemble == "matchgate"
            else "pattern-count-ratio",
            "selberg": "eigenangle-moment-integral",
            "mc": "orbit-sampling",
        }[mode]
        quantity = f"state_frame_potential[{ensemble}]"
    else:
        raise UsageError(f"unknown frame potential kind {which!r}")
    if isinstance(value, apps.MCEstimate):
        record = apps.result_record(
            quantity, n, k, mode, value.value, stderr=value.stderr, formula_ref=ref
        )
        record["samples"] = value.count
    else:
        record = apps.result_record(quantity, n, k, mode, value, formula_ref=ref)
    _emit(record, cfg)
    return EXIT_OK


def cmd_sre(cfg: RunConfig) -> int:
    n = cfg.n
    rows = [
        apps.result_record(
            "sre_annealed", n, 4, "closed", apps.sre_annealed(n), formula_ref="catalan-count"
        )
    ]
    if n <= apps.DIRECT_SRE_MODE_LIMIT:
        rows.append(
            apps.result_record(
                "sre_annealed",
                n,
                4,
                "direct",
                apps.sre_annealed(n, mode="direct"),
                formula_ref="four-replica-twirl",
            )
        )
    _emit(rows, cfg)
    return EXIT_OK


def cmd_definetti(cfg: RunConfig, l: int) -> int:
    n, k = cfg.n, cfg.k
    rows = [
        apps.result_record(
            "definetti_bound", n, k, f"l={l}", apps.definetti_bound(n, k, l),
            formula_ref="invariant-sector-count",
        ),
        apps.result_record(
            "definetti_ratio", n, k, f"l={l}", apps.definetti_ratio(n, k, l),
            formula_ref="vacuum-trace-ratio",
        ),
    ]
    _emit(rows, cfg)
    return EXIT_OK


def cmd_nongauss(cfg: RunConfig, state_path: str, measures: list) -> int:
    data = _load_json_file(state_path)
    if isinstance(data, dict):
        data = data.get("amplitudes")
    if not isinstance(data, list):
        raise UsageError("state file must hold an amplitude list")
    try:
        amplitudes = [complex(entry) if isinstance(entry, str) else complex(*entry) if isinstance(entry, list) else complex(entry) for entry in data]
        psi = apps.StateVector.from_amplitudes(amplitudes)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"malformed state file: {exc}") from None
    rows = []
    for measure in measures:
        if measure == "faf":
            value = apps.faf(psi, cfg.k)
            ref = "covariance-power-trace"
        elif measure == "phi0":
            _gate_gt(cfg.k)
            value = apps.phi0(psi, cfg.k)
            ref = "vacuum-sector-overlap"
        elif measure == "residual":
            _gate_dense(psi.n, 2)
            value = apps.gaussianity_residual(psi)
            ref = "two-copy-pairing-test"
        else:
            raise UsageError(f"unknown measure {measure!r}")
        rows.append(apps.result_record(measure, psi.n, cfg.k, "state", value, formula_ref=ref))
    _emit(rows, cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verification suite


def _verify_checks(level: str, cfg: RunConfig):
    """Yield (name, callable) pairs; each callable returns a residual."""
    tol = cfg.tolerance

    def check_dims():
        residual = 0.0
        grid = [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3)]
        if level == "full":
            grid += [(2, 4), (1, 5)]
        for n, k in grid:
            if len(_cached_gt_basis(n, k)) != commutant_dim(n, k):
                residual += 1.0
        for n, k in [(1, 2), (1, 4), (2, 3)]:
            if len(enumerate_occupancies(n, k)) != cm_dim(n, k):
                residual += 1.0
        return residual

    def check_gram():
        worst = 0.0
        for n, k in [(1, 4), (2, 3)]:
            ops = [el.operator for el in _cached_gt_basis(n, k)]
            gram = np.array([[complex(hs_inner(a, b)).real for b in ops] for a in ops])
            worst = max(worst, float(np.max(np.abs(gram - np.eye(len(ops))))))
        for n, k in [(1, 4), (2, 3)]:
            for occ in enumerate_occupancies(n, k):
                op = pattern_operator(occ, n)
                if complex(hs_inner(op, op)).real != pattern_norm_sq(occ, n):
                    worst = max(worst, 1.0)
        return worst

    def check_commutation():
        rng = np.random.default_rng(cfg.seed)
        worst = 0.0
        draws = 3 if level == "quick" else 10
        for n, k in [(1, 3), (1, 4)]:
            ops = [el.operator for el in _cached_gt_basis(n, k)]
            dense_ops = [to_dense(op) for op in ops]
            for _ in range(draws):
                draw = random_orthogonal(n, int(rng.integers(0, 2**63)))
                uk = kron_power(draw.unitary, k)
                for dop in dense_ops:
                    worst = max(worst, float(np.linalg.norm(dop @ uk - uk @ dop)))
        return worst

    def check_twirl():
        worst = 0.0
        for n, k in [(1, 2), (1, 3)]:
            vac = vacuum_state_operator(n, k)
            tw = apps.matchgate_twirl(vac)
            target = op_to_float(apps.vacuum_projector(n, k)) * (
                1.0 / float(apps.vacuum_trace(n, k))
            )
            worst = max(worst, float(hs_norm(tw - target)))
        for n, k in [(1, 2)] + ([(1, 3), (2, 2)] if level == "full" else []):
            vac = vacuum_state_operator(n, k)
            a = cm_twirl(vac)
            b = cm_twirl_exhaustive(vac)
            worst = max(worst, float(hs_norm(a - b)))
        return worst

    def check_projector():
        grid = [(1, 2), (1, 4), (2, 3)] + ([(2, 4)] if level == "full" else [])
        for n, k in grid:
            P = apps.vacuum_projector(n, k)
            if complex(op_trace(P)) != complex(apps.vacuum_trace(n, k)):
                return 1.0
            lam = bridge_operator(1, 2, n, k, exact=True)
            ann = op_multiply(lam, P)
            if any(complex(c) != 0 for c in ann.terms.values()):
                return 1.0
        return 0.0

    def check_frame_potentials():
        worst = 0.0
        for n in (1, 2):
            for k in (2, 3, 4):
                if apps.unitary_frame_potential(n, k, mode="rmt") != commutant_dim(n, k):
                    worst = max(worst, 1.0)
                closed = apps.state_frame_potential(n, k)
                if apps.state_frame_potential(n, k, mode="selberg") != closed:
                    worst = max(worst, 1.0)
        samples = min(cfg.samples, 2000) if level == "quick" else cfg.samples
        est = apps.unitary_frame_potential(1, 2, mode="mc", samples=samples, seed=cfg.seed)
        if abs(est.value - 3.0) > 5 * est.stderr:
            worst = max(worst, abs(est.value - 3.0))
        return worst

    def check_sre():
        worst = abs(apps.sre_annealed(1, mode="direct") - 0.0)
        worst = max(
            worst, abs(apps.sre_annealed(2, mode="direct") - apps.sre_annealed(2))
        )
        return worst

    def check_definetti():
        for n in (1, 2, 3):
            for k in (4, 9):
                for l in (1, 2):
                    ratio = apps.definetti_ratio(n, k, l)
                    if ratio != apps.vacuum_trace(n, k - l) / apps.vacuum_trace(n, k):
                        return 1.0
                    if 1 - ratio > apps.definetti_bound(n, k, l) / 2:
                        return 1.0
        return 0.0

    def check_nongauss():
        worst = 0.0
        for n in (1, 2):
            worst = max(worst, apps.gaussianity_residual(apps.StateVector.vacuum(n)))
            worst = max(worst, abs(apps.faf(apps.StateVector.vacuum(n), 2)))
        probe = apps.StateVector.from_amplitudes([1, 1, -1, 1])
        if apps.faf(probe, 2) < 0.01 or apps.gaussianity_residual(probe) < 0.01:
            worst = max(worst, 1.0)
        if apps.shadow_inverse_channel(1) != [(0, Fraction(1)), (2, Fraction(1))]:
            worst = max(worst, 1.0)
        return worst

    def check_so_closure():
        # [L_12, L_23] must close onto 2 L_13 exactly
        n, k = 1, 3
        a = bridge_operator(1, 2, n, k, exact=True)
        b = bridge_operator(2, 3, n, k, exact=True)
        c = bridge_operator(1, 3, n, k, exact=True)
        diff = op_multiply(a, b) - op_multiply(b, a) - c * 2
        return 1.0 if any(complex(v) != 0 for v in diff.terms.values()) else 0.0

    yield "dimension-counts", check_dims, 0.5
    yield "basis-orthonormality", check_gram, max(tol, 1e-7)
    yield "haar-commutation", check_commutation, max(tol, 1e-8)
    yield "twirl-agreement", check_twirl, max(tol, 1e-10)
    yield "vacuum-projector", check_projector, 0.5
    yield "frame-potentials", check_frame_potentials, 0.5
    yield "sre-modes", check_sre, max(tol, 1e-9)
    yield "definetti-relations", check_definetti, 0.5
    yield "nongaussianity-probes", check_nongauss, max(tol, 1e-10)
    yield "replica-algebra-closure", check_so_closure, 0.5


def cmd_verify(cfg: RunConfig, level: str) -> int:
    started = time.time()
    checks = []
    failures = 0
    for name, fn, bound in _verify_checks(level, cfg):
        try:
            residual = float(fn())
        except CapacityError as exc:
            checks.append({"check": name, "status": "skipped", "detail": str(exc)})
            continue
        status = "pass" if residual <= bound else "fail"
        if status == "fail":
            failures += 1
        checks.append({"check": name, "status": status, "residual": residual, "bound": bound})
    # elapsed time goes to stderr so the report itself is byte-reproducible
    print(f"verify [{level}] finished in {time.time() - started:.1f}s", file=sys.stderr)
    report = {
        "level": level,
        "seed": cfg.seed,
        "failures": failures,
        "checks": checks,
    }
    csv_rows = [
        {
            "check": c["check"],
            "status": c["status"],
            "residual": c.get("residual", ""),
            "bound": c.get("bound", ""),
        }
        for c in checks
    ]
    _emit(report, cfg, csv_rows=csv_rows)
    return EXIT_OK if failures == 0 else EXIT_CHECK_FAILURE


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mgc",
        description="Replica commutants of matchgate and Clifford-matchgate circuits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_default="1", k_default="2"):
        p.add_argument("--n", default=n_default)
        p.add_argument("--k", default=k_default)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=10000)
        p.add_argument("--tolerance", type=float, default=1e-9)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None)

    p = sub.add_parser("dim", help="commutant dimension table over n and k ranges")
    common(p)

    p = sub.add_parser("verify", help="one-shot verification suite")
    common(p)
    p.add_argument("--level", choices=("quick", "full"), default="quick")

    p = sub.add_parser("basis", help="serialize an orthogonal commutant basis")
    common(p)
    p.add_argument("--which", choices=("gt", "pairing", "pattern"), required=True)

    p = sub.add_parser("twirl", help="project an operator file onto a commutant")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument(
        "--ensemble", choices=("matchgate", "clifford_matchgate"), default="matchgate"
    )

    p = sub.add_parser("frame-potential", help="frame potential in any mode")
    common(p)
    p.add_argument("--which", choices=("unitary", "state"), default="unitary")
    p.add_argument(
        "--ensemble", choices=("matchgate", "clifford_matchgate"), default="matchgate"
    )
    p.add_argument("--mode", choices=("closed", "rmt", "selberg", "mc"), default="closed")

    p = sub.add_parser("sre", help="annealed stabilizer entropy, all available modes")
    common(p)

    p = sub.add_parser("definetti", help="de Finetti bound and sector ratio")
    common(p, k_default="4")
    p.add_argument("--l", type=int, default=1)

    p = sub.add_parser("nongauss", help="non-Gaussianity measures of a state file")
    common(p, k_default="4")
    p.add_argument("--state", required=True)
    p.add_argument("--measures", default="faf,phi0,residual")
    return parser


def _single(values: list, flag: str) -> int:
    if len(values) != 1:
        raise UsageError(f"{flag} must be a single integer for this command")
    return values[0]


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        n_range = _parse_range(args.n)
        k_range = _parse_range(args.k)
        cfg = RunConfig(
            n=n_range[0],
            k=k_range[0],
            seed=args.seed,
            samples=args.samples,
            tolerance=args.tolerance,
            format=args.format,
            out=args.out,
        )
        if args.command == "dim":
            return cmd_dim(cfg, n_range, k_range)
        n = _single(n_range, "--n")
        k = _single(k_range, "--k")
        cfg = RunConfig(
            n=n,
            k=k,
            seed=args.seed,
            samples=args.samples,
            tolerance=args.tolerance,
            format=args.format,
            out=args.out,
        )
        if args.command == "verify":
            return cmd_verify(cfg, args.level)
        if args.command == "basis":
            return cmd_basis(cfg, args.which)
        if args.command == "twirl":
            return cmd_twirl(cfg, args.input, args.ensemble)
        if args.command == "frame-potential":
            return cmd_frame_potential(cfg, args.which, args.ensemble, args.mode)
        if args.command == "sre":
            return cmd_sre(cfg)
        if args.command == "definetti":
            return cmd_definetti(cfg, args.l)
        if args.command == "nongauss":
            measures = [m.strip() for m in args.measures.split(",") if m.strip()]
            return cmd_nongauss(cfg, args.state, measures)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
