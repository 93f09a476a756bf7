"""Command-line surface: run the case studies, compute ledgers from state
files, audit the package's own inequalities.

Exit codes: 0 success, 2 validation failure, 3 numerical failure,
4 property violation.  Failures print one JSON object to stderr,
``{"error": code, "detail": text}``, so scripts never have to parse prose.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import models, sampling
from .measures import write_csv
from .qcore import (
    DensityMatrix,
    HermitianOperator,
    NumericError,
    PropertyViolation,
    QuantumChannel,
    ValidationError,
    apply_channel,
    matrix_from_json,
)
from .measures import coherence, dephase
from .svg import line_plot
from .thermo import (
    delta_S_ir,
    extractable_work,
    first_law_ledger,
    gibbs_state,
    relative_entropy,
    von_neumann_entropy,
)

_EXAMPLE1_DEFAULTS = {
    "example": 1,
    "omega0": 1.0,
    "lambda": 1.0,
    "R": 0.3,
    "beta": 0.1,
    "t_max": 20.0,
    "steps": 20000,
    "out": "example1.csv",
}

_EXAMPLE2_DEFAULTS = {
    "example": 2,
    "case": 1,
    "omega0": 1.0,
    "g": 1.0,
    "omegap": 2.0,
    "gamma": 0.1,
    "beta": 0.1,
    "t_max": 20.0,
    "steps": 8000,
    "out": "example2.csv",
}

_INT_KEYS = {"example", "case", "steps"}
_STR_KEYS = {"out"}

CONTRACTIVITY_TOL = 1e-10
DUAL_PATH_TOL = 1e-10
CLOSURE_TOL = 1e-9


def _read_json(path):
    try:
        with open(path, "r") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc


def _coerce(key: str, value):
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ValidationError(f"config key {key!r} must be a string, got {value!r}")
        return value
    if key in _INT_KEYS:
        if isinstance(value, bool):
            raise ValidationError(f"config key {key!r} must be an integer, got {value!r}")
        if isinstance(value, int):
            return value
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ValidationError(f"config key {key!r} must be an integer, got {value!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"config key {key!r} must be a number, got {value!r}")
    return float(value)


def _parse_override(text: str):
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ValidationError(f"override {text!r} is not of the form key=value")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def _effective_config(defaults: dict, config_path, overrides) -> dict:
    """Overrides beat the config file, which beats the defaults."""
    cfg = dict(defaults)
    if config_path:
        data = _read_json(config_path)
        if not isinstance(data, dict):
            raise ValidationError(f"{config_path}: config must be a JSON object")
        unknown = set(data) - set(defaults)
        if unknown:
            raise ValidationError(f"unknown config keys {sorted(unknown)}")
        for k, v in data.items():
            cfg[k] = _coerce(k, v)
    for item in overrides or ():
        k, v = _parse_override(item)
        if k not in defaults:
            raise ValidationError(f"unknown override key {k!r}")
        cfg[k] = _coerce(k, v)
    return cfg


def _echo_comment(cfg: dict) -> list[str]:
    # the output path is routing, not physics; leaving it out keeps runs
    # with identical physics byte-identical wherever they are written
    physics = {k: v for k, v in cfg.items() if k != "out"}
    return ["config: " + json.dumps(physics, sort_keys=True)]


def _cmd_example1(args) -> int:
    cfg = _effective_config(_EXAMPLE1_DEFAULTS, args.config, args.override)
    if cfg["example"] != 1:
        raise ValidationError(f"config says example {cfg['example']} but the subcommand is example1")
    if args.out:
        cfg["out"] = args.out
    p = models.Example1Params(
        omega0=cfg["omega0"],
        lam=cfg["lambda"],
        R=cfg["R"],
        beta=cfg["beta"],
        t_max=cfg["t_max"],
        steps=cfg["steps"],
    )
    _, series = models.run_example1(p)
    write_csv(series, cfg["out"], _echo_comment(cfg))
    if args.svg:
        line_plot(
            args.svg,
            series.times,
            [("P", series.power)],
            title=f"charging power, R = {cfg['R']:g}",
            xlabel="t",
            ylabel="P",
        )
    print(f"wrote {cfg['out']}")
    return 0


def _cmd_example2(args) -> int:
    cfg = _effective_config(_EXAMPLE2_DEFAULTS, args.config, args.override)
    if cfg["example"] != 2:
        raise ValidationError(f"config says example {cfg['example']} but the subcommand is example2")
    if args.out:
        cfg["out"] = args.out
    p = models.Example2Params(
        g=cfg["g"],
        omega0=cfg["omega0"],
        omegap=cfg["omegap"],
        gamma=cfg["gamma"],
        beta=cfg["beta"],
        case=cfg["case"],
        t_max=cfg["t_max"],
        steps=cfg["steps"],
    )
    _, series = models.run_example2(p)
    write_csv(series, cfg["out"], _echo_comment(cfg))
    if args.svg:
        line_plot(
            args.svg,
            series.times,
            [("C_r", series.coherence), ("P_c", series.coherent_power), ("P", series.power)],
            title=f"coherence and power, case {cfg['case']}",
            xlabel="t",
        )
    print(f"wrote {cfg['out']}")
    return 0


_LEDGER_KEYS = {"beta", "rho0", "h0", "rho_tau", "h_tau", "channel"}


def _cmd_ledger(args) -> int:
    if not args.config:
        raise ValidationError("ledger: --config FILE is required")
    data = _read_json(args.config)
    if not isinstance(data, dict):
        raise ValidationError(f"{args.config}: config must be a JSON object")
    unknown = set(data) - _LEDGER_KEYS
    if unknown:
        raise ValidationError(f"unknown ledger config keys {sorted(unknown)}")
    for key in ("beta", "rho0", "h0"):
        if key not in data:
            raise ValidationError(f"ledger config needs key {key!r}")

    rho0 = DensityMatrix(matrix_from_json(data["rho0"]))
    h0 = HermitianOperator(matrix_from_json(data["h0"]))
    h_tau = HermitianOperator(matrix_from_json(data["h_tau"])) if "h_tau" in data else h0
    if "rho_tau" in data and "channel" in data:
        raise ValidationError("ledger config: give rho_tau or channel, not both")
    if "rho_tau" in data:
        rho_tau = DensityMatrix(matrix_from_json(data["rho_tau"]))
    elif "channel" in data:
        if not isinstance(data["channel"], list):
            raise ValidationError("ledger config: channel must be a list of Kraus matrices")
        chan = QuantumChannel([matrix_from_json(k) for k in data["channel"]])
        rho_tau = apply_channel(chan, rho0)
    else:
        raise ValidationError("ledger config needs rho_tau or channel")

    beta = data["beta"]
    if isinstance(beta, bool) or not isinstance(beta, (int, float)):
        raise ValidationError(f"ledger config: beta must be a number, got {beta!r}")
    led = first_law_ledger(rho0, h0, rho_tau, h_tau, float(beta))
    text = led.to_json()
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _energy(rho: DensityMatrix, h: HermitianOperator) -> float:
    return float(np.einsum("ij,ji->", rho.matrix, h.matrix).real)


def _cmd_audit(args) -> int:
    if args.expect_violation:
        # deliberately non-Gibbs-preserving: damp the Gibbs state toward the
        # ground level and watch the irreversible entropy go negative
        h = HermitianOperator(np.diag([0.0, 1.0]))
        beta = 1.0
        pi = gibbs_state(h, beta).state
        damped = apply_channel(sampling.ground_damping_channel(2, 0.5), pi)
        ds_ir = delta_S_ir(pi, h, damped, h, beta)
        print(f"audit: ground damping on the thermal state, dS_ir = {ds_ir:.6e}")
        if ds_ir < -CONTRACTIVITY_TOL:
            print("audit: negative irreversible entropy exhibited, as constructed")
            return 0
        raise PropertyViolation(
            f"expected the damping construction to give dS_ir < 0, got {ds_ir:.3e}"
        )

    rng = np.random.default_rng(args.seed)
    failures = []
    min_ds_ir = np.inf
    worst_dual = 0.0
    worst_closure = 0.0
    for case in range(args.count):
        dim = int(rng.integers(2, 5))
        beta = float(10.0 ** rng.uniform(-1.0, 1.0))
        h = sampling.random_hermitian(rng, dim)
        rho0 = sampling.random_density(rng, dim)
        # keep every thermal population above float support, so the checks
        # probe the inequalities rather than representation loss
        beta = min(beta, 10.0 / sampling.spectral_span_bound(h))
        chan = sampling.gibbs_preserving_channel(rng, h, beta)
        rho_t = apply_channel(chan, rho0)

        pi = gibbs_state(h, beta).state
        rel0 = relative_entropy(rho0, pi)
        rel_t = relative_entropy(rho_t, pi)
        ds_ir = rel0 - rel_t
        min_ds_ir = min(min_ds_ir, ds_ir)
        if ds_ir < -CONTRACTIVITY_TOL:
            failures.append((case, "contractivity", ds_ir))

        wf0 = extractable_work(rho0, h, beta)
        dual = abs(wf0 - rel0 / beta)
        worst_dual = max(worst_dual, dual)
        if dual > DUAL_PATH_TOL:
            failures.append((case, "dual-path", dual))

        # free-energy change against its coherence decomposition (H fixed,
        # so the partition term drops)
        wf_t = extractable_work(rho_t, h, beta)
        de = _energy(rho_t, h) - _energy(rho0, h)
        dcoh = coherence(rho_t, h) - coherence(rho0, h)
        dsdeph = von_neumann_entropy(dephase(rho_t, h)) - von_neumann_entropy(dephase(rho0, h))
        closure = abs((wf_t - wf0) - (de + (dcoh - dsdeph) / beta))
        worst_closure = max(worst_closure, closure)
        if closure > CLOSURE_TOL:
            failures.append((case, "closure", closure))

    print(f"audit: seed={args.seed} count={args.count}")
    if args.count:
        print(f"audit: contractivity min dS_ir = {min_ds_ir:.6e}")
        print(f"audit: dual-path worst deviation = {worst_dual:.6e}")
        print(f"audit: closure worst deviation = {worst_closure:.6e}")
    if failures:
        for case, kind, value in failures[:20]:
            print(f"audit: FAIL case={case} kind={kind} value={value:.6e}")
        raise PropertyViolation(
            f"{len(failures)} violation(s) in {args.count} cases; "
            f"reproduce with --seed {args.seed} (first failing case {failures[0][0]})"
        )
    print(f"audit: PASS ({args.count} cases, 0 violations)")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qledger",
        description="thermodynamic ledgers, charging power and coherence measures",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = (
        ("example1", _cmd_example1, "run the two-qubit Lorentzian-bath battery"),
        ("example2", _cmd_example2, "run the photon-charged two-qubit battery"),
        ("ledger", _cmd_ledger, "first-law ledger from state/Hamiltonian JSON"),
        ("audit", _cmd_audit, "randomized self-check of the package inequalities"),
    )
    for name, func, help_text in specs:
        s = sub.add_parser(name, help=help_text)
        s.add_argument("--config", metavar="FILE", help="JSON configuration")
        s.add_argument("--override", action="append", default=[], metavar="K=V",
                       help="override one config key (repeatable)")
        s.add_argument("--out", metavar="FILE", help="output path")
        s.add_argument("--svg", metavar="FILE", help="also write an SVG line plot")
        s.add_argument("--seed", type=int, default=42, help="PRNG seed (audit)")
        s.add_argument("--count", type=int, default=1000, help="number of random cases (audit)")
        if name == "audit":
            s.add_argument("--expect-violation", action="store_true",
                           help="demonstrate a constructed negative dS_ir instead")
        s.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if getattr(args, "count", 0) < 0:
        _emit_error("validation", "count must be >= 0")
        return 2
    try:
        return args.func(args)
    except ValidationError as exc:
        _emit_error("validation", str(exc))
        return 2
    except NumericError as exc:
        _emit_error("numeric", str(exc))
        return 3
    except PropertyViolation as exc:
        _emit_error("property", str(exc))
        return 4
    except OSError as exc:
        _emit_error("validation", str(exc))
        return 2


def _emit_error(code: str, detail: str) -> None:
    print(json.dumps({"error": code, "detail": detail}), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
