"""Configuration-driven command line front end.

Usage::

    shellsym <command> --config <path> [--out <path>]

Commands: ``check-ellipticity``, ``check-sl``, ``layer-modes``,
``solve-reduced``, ``sweep-epsilon``, ``sensitivity``, ``rescale-demo``.

The configuration is a flat ``key = value`` text file; lists are
comma-separated.  Outputs are CSV files with a ``# schema=1`` header line,
17-significant-digit floats, '.' decimal separator and LF line endings, so
repeated runs of the same configuration are byte-identical.

Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import geometry, layers, reduced, symbols

SCHEMA_LINE = "# schema=1"
COMMANDS = ("check-ellipticity", "check-sl", "layer-modes", "solve-reduced",
            "sweep-epsilon", "sensitivity", "rescale-demo")


def fmt(x) -> str:
    """Deterministic 17-significant-digit decimal rendering."""
    return format(float(x), ".17g")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str = ""
    chart: str = "frozen"
    chart_params: tuple = ()
    b_coeffs: tuple = (1.0, 0.0, 1.0)
    elasticity: str = "identity"
    elasticity_membrane: tuple = ()
    elasticity_bending: tuple = ()
    epsilon_list: tuple = (1e-2, 1e-3, 1e-4)
    n_modes: int = 128
    d: float = 1.0
    theta: float | None = None
    zeta: float | None = None
    output_path: str = "out.csv"
    xi1_list: tuple = (1.0, 2.0, 4.0, 8.0)
    k_probe: int = 10
    kernel_modes: tuple = (3,)
    f_profile: str = "smooth4"

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.chart not in geometry.CHART_GENERATORS:
            raise ConfigError(f"unknown chart {self.chart!r}")
        if len(self.b_coeffs) != 3:
            raise ConfigError("b_coeffs needs exactly three values")
        if not self.epsilon_list:
            raise ConfigError("epsilon_list must not be empty")
        if any(not 0.0 < e < 1.0 for e in self.epsilon_list):
            raise ConfigError("epsilon values must lie in (0, 1)")
        if self.n_modes < 8:
            raise ConfigError("N must be at least 8")
        if self.d <= 0:
            raise ConfigError("d must be positive")
        if self.elasticity not in ("identity", "frobenius", "isotropic", "explicit"):
            raise ConfigError(f"unknown elasticity {self.elasticity!r}")
        if self.elasticity == "explicit" and (
                len(self.elasticity_membrane) != 6 or len(self.elasticity_bending) != 6):
            raise ConfigError("explicit elasticity needs 6+6 upper-triangle entries")
        b11, b12, b22 = self.b_coeffs
        if self.command in ("check-sl", "layer-modes", "sweep-epsilon") and \
                (b11 <= 0 or b11 * b22 - b12 ** 2 <= 0):
            raise ConfigError("b_coeffs must be surface-elliptic for this command")

    def elasticity_tensor(self) -> geometry.ElasticityTensor:
        if self.elasticity == "identity":
            return geometry.ElasticityTensor.identity()
        if self.elasticity == "frobenius":
            return geometry.ElasticityTensor.frobenius_identity()
        if self.elasticity == "isotropic":
            return geometry.ElasticityTensor.isotropic()

        def mat(vals):
            m = np.empty((3, 3))
            m[0, 0], m[0, 1], m[0, 2], m[1, 1], m[1, 2], m[2, 2] = vals
            m[1, 0], m[2, 0], m[2, 1] = m[0, 1], m[0, 2], m[1, 2]
            return m
        return geometry.ElasticityTensor.from_matrices(
            mat(self.elasticity_membrane), mat(self.elasticity_bending))


_TUPLE_FLOAT = {"chart_params", "b_coeffs", "epsilon_list", "xi1_list",
                "elasticity_membrane", "elasticity_bending"}
_TUPLE_INT = {"kernel_modes"}
_INT = {"n_modes", "k_probe"}
_FLOAT = {"d"}
_OPT_FLOAT = {"theta", "zeta"}


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat key-value format; unknown keys are rejected."""
    known = {f.name for f in fields(ExperimentConfig)}
    cfg = ExperimentConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "N":
            key = "n_modes"
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            if key in _TUPLE_FLOAT:
                parsed = tuple(float(v) for v in value.split(",") if v.strip())
            elif key in _TUPLE_INT:
                parsed = tuple(int(v) for v in value.split(",") if v.strip())
            elif key in _INT:
                parsed = int(value)
            elif key in _FLOAT:
                parsed = float(value)
            elif key in _OPT_FLOAT:
                parsed = None if value.lower() == "none" else float(value)
            else:
                parsed = value
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from exc
        setattr(cfg, key, parsed)
    return cfg


def serialize_config(cfg: ExperimentConfig) -> str:
    """Canonical rendering; ``parse(serialize(c)) == c``."""
    lines = []
    for f in fields(ExperimentConfig):
        value = getattr(cfg, f.name)
        if isinstance(value, tuple):
            rendered = ",".join(fmt(v) if isinstance(v, float) else str(v)
                                for v in value)
        elif value is None:
            rendered = "none"
        elif isinstance(value, float):
            rendered = fmt(value)
        else:
            rendered = str(value)
        lines.append(f"{f.name} = {rendered}")
    return "\n".join(lines) + "\n"


def write_csv(path: str, header: str, rows: list):
    body = "\n".join([SCHEMA_LINE, header] + rows) + "\n"
    with open(path, "w", newline="") as fh:
        fh.write(body)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _chart_points(cfg: ExperimentConfig) -> list:
    """(point_id, MetricData) samples for the configured chart."""
    if cfg.chart == "frozen":
        b11, b12, b22 = cfg.b_coeffs
        return [("frozen", geometry.frozen_point(b11, b12, b22))]
    params = cfg.chart_params or (1.0,)
    chart = geometry.sphere_cap_chart(radius=params[0])
    n1, n2 = chart.shape
    return [(f"sphere({i},{j})", chart.point(i, j))
            for i, j in ((0, 0), (n1 // 2, n2 // 2), (n1 - 1, n2 - 1))]


def cmd_check_ellipticity(cfg: ExperimentConfig) -> None:
    elastic = cfg.elasticity_tensor()
    eps = cfg.epsilon_list[0]
    rows = []
    for point_id, point in _chart_points(cfg):
        for name in ("rigidity", "membrane_tension", "membrane", "koiter"):
            try:
                system = symbols.builtin_system(name, point, elastic, eps)
                rep = symbols.ellipticity_check(system, point)
                rows.append(",".join([point_id, name, str(system.total_order),
                                      fmt(rep.min_abs_det),
                                      str(rep.elliptic).lower()]))
            except geometry.SurfaceEllipticityError:
                rows.append(",".join([point_id, name, "-", fmt(0.0), "false"]))
    write_csv(cfg.output_path, "point_id,system,total_order,min_abs_det,elliptic",
              rows)


_SL_CASES = (
    ("rigidity", "u1"),
    ("rigidity", "u2"),
    ("rigidity", "u3"),
    ("membrane", "membrane_dirichlet"),
    ("membrane", "membrane_traction"),
    ("koiter", "koiter_clamped"),
)


def cmd_check_sl(cfg: ExperimentConfig) -> None:
    elastic = cfg.elasticity_tensor()
    b11, b12, b22 = cfg.b_coeffs
    point = geometry.frozen_point(b11, b12, b22)
    eps = cfg.epsilon_list[0]
    rows = []
    for sys_name, bc_name in _SL_CASES:
        system = symbols.builtin_system(sys_name, point, elastic, eps)
        bc = symbols.builtin_boundary_conditions(bc_name, elastic)
        for xi1 in cfg.xi1_list:
            rep = symbols.sl_check(system, bc, point, xi1,
                                   point_id=f"{sys_name}+{bc_name}")
            rows.append(rep.csv_row(fmt))
    write_csv(cfg.output_path, symbols.SLReport.CSV_HEADER, rows)


def cmd_layer_modes(cfg: ExperimentConfig) -> None:
    elastic = cfg.elasticity_tensor()
    rows = [layers.mode_table_row(xi1, cfg.b_coeffs, elastic, fmt)
            for xi1 in cfg.xi1_list]
    write_csv(cfg.output_path, layers.MODE_TABLE_HEADER, rows)


def _operator(cfg: ExperimentConfig, eps: float) -> reduced.ReducedOperator:
    if cfg.theta is not None and cfg.zeta is not None:
        return reduced.build_default_operator(
            d=cfg.d, n_modes=cfg.n_modes, eps=eps,
            theta=cfg.theta, zeta=cfg.zeta)
    elastic = cfg.elasticity_tensor()
    p_sym, q_sym = layers.energy_symbols(cfg.b_coeffs, elastic)
    return reduced.build_default_operator(
        (p_sym, q_sym), d=cfg.d, n_modes=cfg.n_modes, eps=eps,
        theta=cfg.theta, zeta=cfg.zeta)


def _load(cfg: ExperimentConfig) -> reduced.SpectralField:
    if cfg.f_profile == "flat":
        return reduced.flat_load(cfg.n_modes)
    if cfg.f_profile.startswith("delta:"):
        return reduced.SpectralField.delta(cfg.n_modes,
                                           int(cfg.f_profile.split(":")[1]))
    if cfg.f_profile == "smooth4":
        return reduced.smooth_load(cfg.n_modes, decay=2.0)
    raise ConfigError(f"unknown f_profile {cfg.f_profile!r}")


def cmd_solve_reduced(cfg: ExperimentConfig) -> None:
    op = _operator(cfg, cfg.epsilon_list[0])
    load = _load(cfg)
    v = reduced.solve(op, load)
    rows = []
    for i, k in enumerate(v.wavenumbers):
        rows.append(",".join([str(int(k)), fmt(load.coeffs[i].real),
                              fmt(v.coeffs[i].real), fmt(v.coeffs[i].imag),
                              fmt(abs(v.coeffs[i]))]))
    write_csv(cfg.output_path, "k,f_re,v_re,v_im,v_abs", rows)


def cmd_sweep_epsilon(cfg: ExperimentConfig) -> None:
    load = _load(cfg)
    flat = reduced.flat_load(cfg.n_modes)
    rows = []
    for eps in cfg.epsilon_list:
        op = _operator(cfg, eps)
        k_star = reduced.frequency_window(op)
        argmax = reduced.solution_argmax(op, flat)
        vmax = float(np.abs(reduced.solve(op, flat).coeffs).max())
        row = reduced.va_norm_convergence(op, [eps], load)[0]
        coer = reduced.coercivity_constant(op)
        amp = reduced.sensitivity_probe(op, cfg.k_probe)
        rows.append(",".join([fmt(eps), fmt(k_star), str(argmax), fmt(vmax),
                              fmt(row.va_distance), fmt(coer), fmt(amp)]))
    write_csv(cfg.output_path,
              "eps,k_star,argmax_k,max_abs_v,va_distance,coercivity,amplification",
              rows)


def cmd_sensitivity(cfg: ExperimentConfig) -> None:
    eps = cfg.epsilon_list[0]
    op0 = _operator(cfg, eps).with_eps(0.0)
    op = _operator(cfg, eps)
    rows = []
    for k in range(0, cfg.n_modes + 1):
        rows.append(",".join([str(k), fmt(reduced.sensitivity_probe(op0, k)),
                              fmt(reduced.sensitivity_probe(op, k))]))
    write_csv(cfg.output_path, "k,amplification_eps0,amplification_eps", rows)


def cmd_rescale_demo(cfg: ExperimentConfig) -> None:
    op = reduced.with_kernel(_operator(cfg, cfg.epsilon_list[0]),
                             cfg.kernel_modes)
    load = _load(cfg)
    _, rows_data = reduced.noninhibited_rescale(op, load, cfg.epsilon_list,
                                                cfg.kernel_modes)
    rows = [",".join([fmt(r.eps), fmt(r.kernel_error), fmt(r.off_kernel_max)])
            for r in rows_data]
    write_csv(cfg.output_path, "eps,kernel_error,off_kernel_max", rows)


_DISPATCH = {
    "check-ellipticity": cmd_check_ellipticity,
    "check-sl": cmd_check_sl,
    "layer-modes": cmd_layer_modes,
    "solve-reduced": cmd_solve_reduced,
    "sweep-epsilon": cmd_sweep_epsilon,
    "sensitivity": cmd_sensitivity,
    "rescale-demo": cmd_rescale_demo,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="shellsym",
        description="Ellipticity/SL checks, layer modes and the reduced "
                    "boundary solver for sensitive elliptic shells.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="flat key=value file")
    parser.add_argument("--out", default=None, help="override output_path")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
        cfg.command = args.command
        if args.out is not None:
            cfg.output_path = args.out
        cfg.validate()
    except (OSError, ConfigError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    try:
        _DISPATCH[cfg.command](cfg)
    except (symbols.EllipticityError, symbols.JordanDepthError,
            symbols.DegenerateModeError, layers.StructureError,
            geometry.SurfaceEllipticityError, geometry.InvariantError,
            reduced.KernelModeError, reduced.WindowResolutionError,
            reduced.AliasingError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
