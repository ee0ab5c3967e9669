"""Command-line workbench: model reports, trajectory runs, permutation sweeps.

Configs are flat JSON files; see `parse_config` for the recognized keys.
All numeric output is formatted %.12e with LF line endings so identical
configs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dsp_core, lindblad, optimizer, qmat, rydberg
from .lindblad import IntegrationError, ModelError, ModelSpec

__all__ = [
    "DEMO_POPULATIONS",
    "ConfigError",
    "RunConfig",
    "console_main",
    "main",
    "parse_config",
    "write_csv",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_DISAGREEMENT = 4
EXIT_CONDITIONS = 5

# Benchmark population multiset used by the bundled studies.
DEMO_POPULATIONS = (0.2, 0.15, 0.1, 0.4, 0.08, 0.07)

PERMUTATION_LABELS = ("A", "B", "C", "optimal", "passive", "all")


class ConfigError(ValueError):
    """Unusable run configuration."""


@dataclass
class RunConfig:
    model: str = "rydberg"
    rydberg_params: rydberg.RydbergParams = field(default_factory=rydberg.RydbergParams)
    custom: dict | None = None
    populations: str | tuple[float, ...] = "demo"
    beta: float = 20.0
    permutation: object = "A"  # label, list of labels, or 1-based index list
    t_end: float = 5000.0
    step: float | None = None
    stride: int = 20
    g: float = optimizer.DEFAULT_HEAT_WEIGHT
    out: str | None = None


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def parse_config(path: str | Path) -> RunConfig:
    """Load and validate a JSON run configuration.

    Keys: model ("rydberg"|"custom"), rydberg {omega2, omega, gamma},
    custom {dim, hamiltonian, jump_ops, rates, target, gamma_ref},
    populations ("demo"|"thermal"|list), beta, permutation (label, list of
    labels, or 1-based index list), t_end, step, stride, g, out.
    Matrices use row-major [re, im] entry pairs.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"invalid JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    _expect(isinstance(raw, dict), "config root must be a JSON object")

    known = {
        "model", "rydberg", "custom", "populations", "beta",
        "permutation", "t_end", "step", "stride", "g", "out",
    }
    for key in raw:
        _expect(key in known, f"unknown config key {key!r}")

    cfg = RunConfig()
    cfg.model = raw.get("model", "rydberg")
    _expect(cfg.model in ("rydberg", "custom"), f"model must be 'rydberg' or 'custom', got {cfg.model!r}")

    ryd = raw.get("rydberg", {})
    _expect(isinstance(ryd, dict), "key 'rydberg' must be an object")
    for key in ryd:
        _expect(key in ("omega2", "omega", "gamma"), f"unknown rydberg key {key!r}")
    try:
        cfg.rydberg_params = rydberg.RydbergParams(
            omega2=float(ryd.get("omega2", 0.02)),
            omega=float(ryd.get("omega", 0.01)),
            gamma=float(ryd.get("gamma", 0.03)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad rydberg parameters: {exc}") from exc

    cfg.custom = raw.get("custom")
    if cfg.model == "custom":
        _expect(isinstance(cfg.custom, dict), "model 'custom' requires a 'custom' object")

    pops = raw.get("populations", "demo")
    if isinstance(pops, str):
        _expect(pops in ("demo", "thermal"), f"populations must be 'demo', 'thermal' or a list, got {pops!r}")
        cfg.populations = pops
    else:
        _expect(isinstance(pops, list) and pops, "populations list must be nonempty")
        try:
            cfg.populations = tuple(float(x) for x in pops)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"populations entries must be numbers: {exc}") from exc

    cfg.beta = _number(raw, "beta", 20.0)
    cfg.permutation = raw.get("permutation", "A")
    cfg.t_end = _number(raw, "t_end", 5000.0)
    _expect(cfg.t_end > 0, "t_end must be positive")
    step = raw.get("step")
    if step is not None:
        cfg.step = float(step)
        _expect(cfg.step > 0, "step must be positive")
    stride = raw.get("stride", 20)
    _expect(isinstance(stride, int) and stride >= 1, "stride must be an integer >= 1")
    cfg.stride = stride
    cfg.g = _number(raw, "g", optimizer.DEFAULT_HEAT_WEIGHT)
    _expect(0.0 <= cfg.g < 1.0, "g must lie in [0, 1)")
    out = raw.get("out")
    _expect(out is None or isinstance(out, str), "key 'out' must be a string path")
    cfg.out = out
    return cfg


def _number(raw: dict, key: str, default: float) -> float:
    value = raw.get(key, default)
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"key {key!r} must be a number, got {value!r}") from exc


def _matrix_from_pairs(obj, dim: int, what: str) -> np.ndarray:
    _expect(isinstance(obj, list) and len(obj) == dim, f"{what} must have {dim} rows")
    m = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(obj):
        _expect(isinstance(row, list) and len(row) == dim, f"{what} row {i} must have {dim} entries")
        for j, pair in enumerate(row):
            _expect(
                isinstance(pair, list) and len(pair) == 2,
                f"{what}[{i}][{j}] must be a [re, im] pair",
            )
            m[i, j] = complex(float(pair[0]), float(pair[1]))
    return m


def _vector_from_pairs(obj, dim: int, what: str) -> np.ndarray:
    _expect(isinstance(obj, list) and len(obj) == dim, f"{what} must have {dim} entries")
    v = np.zeros(dim, dtype=complex)
    for i, pair in enumerate(obj):
        _expect(
            isinstance(pair, list) and len(pair) == 2,
            f"{what}[{i}] must be a [re, im] pair",
        )
        v[i] = complex(float(pair[0]), float(pair[1]))
    return v


def load_model(cfg: RunConfig, strict: bool = True) -> ModelSpec:
    """Build the configured model; with strict=True the dark-state
    conditions and target alignment must hold."""
    if cfg.model == "rydberg":
        model = rydberg.build_model(cfg.rydberg_params)
    else:
        model = _load_custom_model(cfg.custom)
    if strict:
        model.check_target_alignment()
        report = dsp_core.verify_dsp_conditions(model)
        if not report.passes:
            raise ModelError(
                "model does not satisfy the dark-state conditions: "
                f"eigen residual {report.eigen_residual:.3e}, "
                f"jump residuals {['%.3e' % r for r in report.jump_residuals]}"
            )
    return model


def _load_custom_model(raw: dict | None) -> ModelSpec:
    _expect(isinstance(raw, dict), "custom model requires an object")
    for key in raw:
        _expect(
            key in ("dim", "hamiltonian", "jump_ops", "rates", "target", "gamma_ref"),
            f"unknown custom-model key {key!r}",
        )
    dim = raw.get("dim")
    _expect(isinstance(dim, int) and dim >= 1, "custom.dim must be a positive integer")
    try:
        h = _matrix_from_pairs(raw.get("hamiltonian"), dim, "custom.hamiltonian")
        jump_raw = raw.get("jump_ops", [])
        _expect(isinstance(jump_raw, list), "custom.jump_ops must be a list")
        jumps = [
            _matrix_from_pairs(obj, dim, f"custom.jump_ops[{k}]")
            for k, obj in enumerate(jump_raw)
        ]
        target = _vector_from_pairs(raw.get("target"), dim, "custom.target")
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad custom model matrices: {exc}") from exc
    rates_raw = raw.get("rates", [])
    _expect(
        isinstance(rates_raw, list) and len(rates_raw) == len(jumps),
        "custom.rates must list one rate per jump operator",
    )
    rates = [float(g) for g in rates_raw]
    gamma_ref = raw.get("gamma_ref")
    try:
        target = qmat.as_ket(target)
        eig = qmat.hermitian_eigensystem(h, target=target)
        overlaps = np.abs(eig.vectors.conj().T @ target)
        target_index = int(np.argmax(overlaps)) + 1
        return ModelSpec(
            h_s=h,
            jump_ops=jumps,
            rates=rates,
            target=target,
            eigensystem=eig,
            target_index=target_index,
            gamma_ref=None if gamma_ref is None else float(gamma_ref),
        )
    except (ValueError, qmat.ConvergenceError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ConfigError(f"cannot build custom model: {exc}") from exc


def resolve_populations(cfg: RunConfig, model: ModelSpec) -> np.ndarray:
    """The population multiset before any permutation is applied."""
    if cfg.populations == "demo":
        _expect(model.dim == len(DEMO_POPULATIONS), "demo populations need a 6-level model")
        return np.array(DEMO_POPULATIONS)
    if cfg.populations == "thermal":
        return rydberg.thermal_populations(cfg.beta, model.eigensystem.eigenvalues)
    lam = np.asarray(cfg.populations, dtype=float)
    _expect(lam.size == model.dim, f"expected {model.dim} populations, got {lam.size}")
    _expect(bool(np.all(lam >= 0.0)), "populations must be nonnegative")
    total = float(lam.sum())
    _expect(abs(total - 1.0) <= 1e-9, f"populations sum to {total!r}, more than 1e-9 away from 1")
    return lam / total


def _permutation_for_label(label: str, lam: np.ndarray, model: ModelSpec):
    if label in ("A", "optimal"):
        return optimizer.optimal_permutation(lam, model)
    if label == "B":
        return tuple(int(i) for i in np.argsort(lam, kind="stable"))
    if label in ("C", "passive"):
        return optimizer.passive_permutation(lam)
    raise ConfigError(f"unknown permutation label {label!r}")


def resolve_permutations(
    cfg: RunConfig, lam: np.ndarray, model: ModelSpec, allow_all: bool = False
) -> list[tuple[str, tuple[int, ...]]]:
    """Labelled permutations requested by the config."""
    req = cfg.permutation
    if isinstance(req, str):
        if req == "all":
            _expect(allow_all, "permutation 'all' only applies to the sweep command")
            return []
        return [(req, _permutation_for_label(req, lam, model))]
    _expect(isinstance(req, list) and req, "permutation must be a label or a nonempty list")
    if all(isinstance(x, str) for x in req):
        return [(label, _permutation_for_label(label, lam, model)) for label in req]
    try:
        indices = [int(x) for x in req]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"permutation list must be labels or 1-based indices: {exc}") from exc
    _expect(sorted(indices) == list(range(1, lam.size + 1)),
            f"explicit permutation must be a bijection of 1..{lam.size}")
    return [("explicit", tuple(i - 1 for i in indices))]


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12e}"


def write_csv(path: str | Path, header: list[str], rows) -> None:
    """Comma-separated, %.12e floats, LF endings, trailing newline."""
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def _out_path(cfg: RunConfig, default: str) -> Path:
    return Path(cfg.out if cfg.out else default)


def _perm_string(perm) -> str:
    return "-".join(str(i + 1) for i in perm)


def _arrangement_string(arrangement) -> str:
    return ";".join(f"{v:.12e}" for v in arrangement)


def cmd_model_info(cfg: RunConfig) -> int:
    model = load_model(cfg, strict=False)
    report = dsp_core.verify_dsp_conditions(model)
    a = dsp_core.coefficient_a(model)
    lines = [
        f"model: {cfg.model} (dim {model.dim})",
        "eigenvalues: " + " ".join(f"{e:.12e}" for e in model.eigensystem.eigenvalues),
        f"target index: {model.target_index}",
        f"target energy: {model.target_energy:.12e}",
        f"target alignment defect: {model.target_alignment_defect():.3e}",
        f"eigen residual: {report.eigen_residual:.3e}",
        "jump residuals: " + " ".join(f"{r:.3e}" for r in report.jump_residuals),
        f"dark-state conditions: {'pass' if report.passes else 'FAIL'}",
        f"speed coefficient A: {a:.12e}",
    ]
    if a <= 0.0:
        lines.append("warning: QSL undefined (A = 0)")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if cfg.out:
        Path(cfg.out).write_text(text)
    return EXIT_OK if report.passes else EXIT_CONDITIONS


def cmd_simulate(cfg: RunConfig) -> int:
    model = load_model(cfg)
    lam = resolve_populations(cfg, model)
    requested = resolve_permutations(cfg, lam, model)
    out = _out_path(cfg, "trajectory.csv")
    gamma_ref = model.gamma_ref if model.gamma_ref is not None else float("nan")
    for label, perm in requested:
        arranged = optimizer.apply_permutation(lam, perm)
        rho0 = dsp_core.state_from_populations(model.eigensystem, arranged)
        traj = lindblad.evolve(model, rho0, cfg.t_end, step=cfg.step, stride=cfg.stride)
        path = out if len(requested) == 1 else out.with_name(f"{out.stem}_{label}{out.suffix}")
        rows = zip(
            traj.times,
            traj.times * gamma_ref,
            traj.fidelities,
            traj.angles,
            traj.trace_devs,
            traj.min_eigs,
            traj.coherence_maxes,
        )
        write_csv(
            path,
            ["t", "t_gamma", "fidelity", "angle", "trace_dev", "min_eig", "max_coherence"],
            rows,
        )
        sys.stdout.write(f"{label}: wrote {path} ({len(traj)} records)\n")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    model = load_model(cfg)
    lam = resolve_populations(cfg, model)
    try:
        reports = optimizer.enumerate_permutations(lam, model, g=cfg.g)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    mask = optimizer.pareto_mask(reports)
    gamma_ref = model.gamma_ref if model.gamma_ref is not None else float("nan")
    rows = []
    for k, (rep, pareto) in enumerate(zip(reports, mask), start=1):
        rows.append(
            (
                k,
                _perm_string(rep.permutation),
                _arrangement_string(rep.arrangement),
                rep.lambda_target,
                rep.t_qsl,
                rep.t_qsl * gamma_ref,
                rep.t_qsl_2,
                rep.heat,
                rep.entropy,
                rep.objective,
                int(pareto),
            )
        )
    path = _out_path(cfg, "sweep.csv")
    write_csv(
        path,
        [
            "perm_id", "permutation", "arrangement", "lambda_target",
            "t_qsl", "t_qsl_gamma", "t_qsl_2", "heat", "entropy",
            "objective_w", "pareto",
        ],
        rows,
    )
    winner = optimizer.lexicographic_select(reports)
    sys.stdout.write(
        f"wrote {path} ({len(reports)} arrangements); "
        f"winner {_perm_string(winner.permutation)} "
        f"t_qsl={winner.t_qsl:.12e} heat={winner.heat:.12e}\n"
    )
    return EXIT_OK


def cmd_optimize(cfg: RunConfig) -> int:
    model = load_model(cfg)
    lam = resolve_populations(cfg, model)
    try:
        reports = optimizer.enumerate_permutations(lam, model, g=cfg.g)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    winner = optimizer.lexicographic_select(reports)
    analytic_perm = optimizer.optimal_permutation(lam, model)
    analytic_arrangement = tuple(float(v) for v in optimizer.apply_permutation(lam, analytic_perm))
    by_arrangement = {r.arrangement: r for r in reports}
    analytic = by_arrangement[analytic_arrangement]
    agree = winner.arrangement == analytic_arrangement

    lines = [
        f"analytic arrangement: {_arrangement_string(analytic_arrangement)}",
        f"analytic (t_qsl, heat): ({analytic.t_qsl:.12e}, {analytic.heat:.12e})",
        f"brute-force winner:   {_arrangement_string(winner.arrangement)}",
        f"winner (t_qsl, heat): ({winner.t_qsl:.12e}, {winner.heat:.12e})",
        f"agreement: {'true' if agree else 'FALSE'}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    if cfg.out:
        payload = {
            "analytic": {
                "permutation": [i + 1 for i in analytic_perm],
                "arrangement": list(analytic_arrangement),
                "t_qsl": analytic.t_qsl,
                "heat": analytic.heat,
            },
            "winner": {
                "permutation": [i + 1 for i in winner.permutation],
                "arrangement": list(winner.arrangement),
                "t_qsl": winner.t_qsl,
                "heat": winner.heat,
            },
            "agreement": agree,
        }
        Path(cfg.out).write_text(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK if agree else EXIT_DISAGREEMENT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dspqsl",
        description="Dissipative state preparation workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("model-info", "print spectrum, target slot, conditions and speed coefficient"),
        ("simulate", "integrate trajectories and write fidelity CSV files"),
        ("sweep", "score every permutation of the populations into a CSV"),
        ("optimize", "compare the analytic optimum against brute force"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", help="output path (overrides the config)")
        p.add_argument("--step", type=float, help="integrator step override")
        p.add_argument("--t-end", type=float, dest="t_end", help="final time override")
    return parser


_COMMANDS = {
    "model-info": cmd_model_info,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
        if args.out is not None:
            cfg.out = args.out
        if args.step is not None:
            if args.step <= 0:
                raise ConfigError("step must be positive")
            cfg.step = args.step
        if args.t_end is not None:
            if args.t_end <= 0:
                raise ConfigError("t_end must be positive")
            cfg.t_end = args.t_end
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"integration aborted: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_CONDITIONS


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
