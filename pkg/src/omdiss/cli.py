"""Command-line front end.

Configuration files are plain ``key=value`` lines with ``#`` comments. Any
numeric key may instead hold a grid ``start:stop:count``. Besides the
physical parameters (omega_m, kappa, gamma, delta, A, B, abar, n_th) and
``mode``, the grid-only keys ``omega`` and ``delta_probe`` set the spectral
and probe axes.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import modes, noise, omit, spectra, stability, verification
from .model import SystemParams, at_detuning
from .oracle import oracle_spectra

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_UNSTABLE = 0, 2, 3, 4

PARAM_KEYS = {
    "omega_m": "omega_m", "kappa": "kappa", "gamma": "gamma", "delta": "delta",
    "A": "a_disp", "B": "b_diss", "abar": "abar", "n_th": "n_th",
}
GRID_ONLY_KEYS = ("omega", "delta_probe")
MODES = ("fixed-abar", "fixed-drive")
DEFAULTS = {"omega_m": 3.0, "kappa": 1.0, "gamma": 3e-5, "delta": -3.0,
            "A": 0.0, "B": 0.0, "abar": 1.0, "n_th": 100.0}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    count: int

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    def __str__(self):
        return f"{_fmt(self.start)}:{_fmt(self.stop)}:{self.count}"


@dataclass
class RunConfig:
    values: dict = field(default_factory=lambda: dict(DEFAULTS))
    grids: dict = field(default_factory=dict)
    mode: str = "fixed-abar"

    def params(self, **overrides) -> SystemParams:
        merged = {**self.values, **overrides}
        kwargs = {PARAM_KEYS[k]: float(v) for k, v in merged.items() if k in PARAM_KEYS}
        try:
            return SystemParams(**kwargs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def grid(self, key: str, default: Grid | None = None) -> np.ndarray:
        if key in self.grids:
            return self.grids[key].values
        if default is None:
            raise ConfigError(f"a grid for {key!r} is required (key=start:stop:count)")
        return default.values

    def header(self) -> dict:
        out = {k: _fmt(v) for k, v in self.values.items() if k not in self.grids}
        out.update({k: str(g) for k, g in self.grids.items()})
        out["mode"] = self.mode
        return out


def _parse_value(key: str, text: str, where: str):
    if key == "mode":
        if text not in MODES:
            raise ConfigError(f"{where}: mode must be one of {MODES}, got {text!r}")
        return text
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{where}: grid must be start:stop:count, got {text!r}")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(f"{where}: cannot parse grid {text!r}") from None
        if count < 2 or not stop > start:
            raise ConfigError(f"{where}: grid needs count >= 2 and stop > start")
        return Grid(start, stop, count)
    if key in GRID_ONLY_KEYS:
        raise ConfigError(f"{where}: {key} must be a grid start:stop:count")
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{where}: {key} is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{where}: {key} must be finite")
    return value


def apply_setting(cfg: RunConfig, line: str, where: str) -> None:
    if "=" not in line:
        raise ConfigError(f"{where}: expected key=value, got {line!r}")
    key, text = (s.strip() for s in line.split("=", 1))
    if key not in PARAM_KEYS and key not in GRID_ONLY_KEYS and key != "mode":
        raise ConfigError(f"{where}: unknown key {key!r}")
    value = _parse_value(key, text, where)
    if key == "mode":
        cfg.mode = value
    elif isinstance(value, Grid):
        cfg.grids[key] = value
    else:
        cfg.grids.pop(key, None)
        cfg.values[key] = value


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            apply_setting(cfg, line, f"{source}:{lineno}")
    return cfg


# ---------------------------------------------------------------- output

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return repr(float(x))


@dataclass
class Dataset:
    command: str
    header: dict
    columns: dict
    notes: list = field(default_factory=list)

    def to_csv(self) -> str:
        lines = [f"# omdiss {self.command}"]
        lines += [f"# {k}={v}" for k, v in self.header.items()]
        lines += [f"# note: {n}" for n in self.notes]
        names = list(self.columns)
        lines.append(",".join(names))
        cols = [self.columns[n] for n in names]
        for row in zip(*cols):
            lines.append(",".join(_fmt(x) for x in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        def conv(x):
            if isinstance(x, (bool, np.bool_)):
                return bool(x)
            if isinstance(x, (int, np.integer)):
                return int(x)
            if isinstance(x, str):
                return x
            x = float(x)
            return x if math.isfinite(x) else repr(x)

        doc = {
            "command": self.command,
            "params": self.header,
            "notes": self.notes,
            "columns": {k: [conv(x) for x in v] for k, v in self.columns.items()},
        }
        return json.dumps(doc, indent=1) + "\n"


def _complex_columns(name: str, values) -> dict:
    values = np.asarray(values)
    return {f"{name}_re": values.real.tolist(), f"{name}_im": values.imag.tolist()}


# ---------------------------------------------------------------- commands

def _delta_grid(cfg):
    om = cfg.values["omega_m"]
    return cfg.grid("delta", Grid(-3 * om, 3 * om, 601))


def cmd_damping(cfg: RunConfig) -> Dataset:
    base = cfg.params()
    cols = {k: [] for k in ("delta", "gamma_opt", "delta_omega_m", "gamma_tot", "n_opt", "n_osc")}
    for delta in _delta_grid(cfg):
        p = at_detuning(base, float(delta), cfg.mode)
        r = noise.weak_coupling_report(p)
        cols["delta"].append(delta)
        cols["gamma_opt"].append(r.gamma_opt)
        cols["delta_omega_m"].append(r.delta_omega_m)
        cols["gamma_tot"].append(r.gamma_tot)
        cols["n_opt"].append(r.n_opt)
        cols["n_osc"].append(r.n_osc)
    return Dataset("damping", cfg.header(), cols)


def cmd_spectrum(cfg: RunConfig, kind: str = "mechanical", verify: bool = False):
    base = cfg.params()
    om = cfg.values["omega_m"]
    omegas = cfg.grid("omega", Grid(-2 * om, 2 * om, 2001))
    deltas = cfg.grids["delta"].values if "delta" in cfg.grids else [cfg.values["delta"]]
    cols = {"delta": [], "omega": [], "value": [], "stable": []}
    if verify:
        cols.update({"oracle": [], "rel_err": []})
    notes, worst, any_unstable = [], 0.0, False
    oracle_kind = {"mechanical": "s_cc", "cavity": "s_dd", "output": "s_dd_out"}.get(kind)
    if verify and oracle_kind is None:
        notes.append(f"no oracle route for kind={kind}; verification skipped")
    for delta in deltas:
        p = at_detuning(base, float(delta), cfg.mode)
        series = spectra.spectrum(p, omegas, kind)
        any_unstable |= not series.stable
        cols["delta"].extend([delta] * omegas.size)
        cols["omega"].extend(omegas.tolist())
        cols["value"].extend(series.values.tolist())
        cols["stable"].extend([series.stable] * omegas.size)
        if verify:
            if oracle_kind is None:
                ref = np.full(omegas.size, np.nan)
                err = np.zeros(omegas.size)
            else:
                ref = getattr(oracle_spectra(p, omegas), oracle_kind)
                err = verification.relative_error(series.values, ref)
                worst = max(worst, float(np.max(err)))
            cols["oracle"].extend(ref.tolist())
            cols["rel_err"].extend(err.tolist())
    if any_unstable:
        notes.append("some operating points are unstable; spectra there are formal")
    ds = Dataset(f"spectrum kind={kind}", cfg.header(), cols, notes)
    return ds, worst, any_unstable


def _coupling_axis(cfg: RunConfig):
    gridded = [k for k in ("A", "B") if k in cfg.grids]
    if len(gridded) != 1:
        raise ConfigError("exactly one of A or B must be given as a grid")
    key = gridded[0]
    return key, cfg.grids[key].values


def cmd_stability(cfg: RunConfig) -> Dataset:
    key, raw = _coupling_axis(cfg)
    base = cfg.params(**{key: 0.0})
    couplings = raw * base.abar
    smap = stability.stability_map(base, _delta_grid(cfg), couplings, key, cfg.mode)
    names = {stability.STABLE: "stable", stability.MARGINAL: "marginal",
             stability.UNSTABLE: "unstable", stability.POISONED: "poisoned"}
    cols = {"delta": [], "coupling": [], "stable": [], "max_re_eig": [], "gamma_tot": [], "label": []}
    for i, delta in enumerate(smap.delta_grid):
        for j, c in enumerate(smap.coupling_grid):
            cols["delta"].append(delta)
            cols["coupling"].append(c)
            cols["stable"].append(bool(smap.stable[i, j]))
            cols["max_re_eig"].append(smap.max_re_eig[i, j])
            cols["gamma_tot"].append(smap.gamma_tot[i, j])
            cols["label"].append(names[int(smap.label[i, j])])
    header = cfg.header()
    header["coupling_axis"] = f"{key}*abar"
    return Dataset("stability", header, cols)


def cmd_modes(cfg: RunConfig) -> Dataset:
    base = cfg.params()
    if "delta" in cfg.grids:
        if any(k in cfg.grids for k in ("A", "B")):
            raise ConfigError("modes sweeps either delta or one coupling, not both")
        axis_name, axis = "delta", cfg.grids["delta"].values
        points = [at_detuning(base, float(d), cfg.mode) for d in axis]
    else:
        key, raw = _coupling_axis(cfg)
        axis_name, axis = "coupling", raw * base.abar
        field_name = PARAM_KEYS[key]
        points = [base.replace(**{field_name: float(r)}) for r in raw]
    cols = {axis_name: list(axis)}
    e_plus, e_minus, residual = [], [], []
    for p in points:
        pair = modes.eigenvalues(p)
        e_plus.append(pair.e_plus)
        e_minus.append(pair.e_minus)
        expected = (p.omega_m - p.delta) - 0.5j * (p.gamma + p.kappa)
        residual.append(abs(pair.e_plus + pair.e_minus - expected))
    cols.update(_complex_columns("e_plus", e_plus))
    cols.update(_complex_columns("e_minus", e_minus))
    cols["trace_residual"] = residual
    header = cfg.header()
    try:
        disp, diss = modes.critical_coupling(base)
        header["dispersive_threshold"] = _fmt(disp)
        header["dissipative_threshold"] = _fmt(diss)
    except ValueError as exc:
        header["threshold"] = str(exc)
    return Dataset("modes", header, cols)


def cmd_omit(cfg: RunConfig):
    p = cfg.params()
    om = cfg.values["omega_m"]
    deltas = cfg.grid("delta_probe", Grid(-2 * om, 2 * om, 2001))
    resp = omit.omit_response(p, deltas)
    cols = {"delta_probe": deltas.tolist()}
    cols.update(_complex_columns("a_minus", resp.a_minus))
    cols.update(_complex_columns("a_plus", resp.a_plus))
    cols.update(_complex_columns("a_minus_approx", resp.a_minus_approx))
    cols["approx_error"] = np.abs(resp.a_minus - resp.a_minus_approx).tolist()
    stable = stability.is_stable(p).stable
    header = cfg.header()
    header["stable"] = _fmt(stable)
    return Dataset("omit", header, cols), stable


def cmd_verify(n_cases: int, seed: int, rtol_factor: float):
    cases = verification.random_battery(n_cases, seed)
    results = verification.run_battery(cases)
    tol = verification.default_tolerances(rtol_factor)
    lines, failed = [], 0
    for k, res in enumerate(results):
        if res.skipped:
            lines.append(f"case {k:3d}: SKIP {res.skipped}")
            continue
        ok = res.passed(tol)
        failed += not ok
        worst = ", ".join(f"{name}={err:.2e}" for name, err in res.errors.items())
        lines.append(f"case {k:3d}: {'PASS' if ok else 'FAIL'} {worst}")
    checked = sum(not r.skipped for r in results)
    lines.append(f"checked {checked}, skipped {len(results) - checked}, failed {failed}")
    return "\n".join(lines) + "\n", failed == 0 and checked > 0


# ---------------------------------------------------------------- figure presets

def _preset(**values) -> RunConfig:
    cfg = RunConfig()
    cfg.values.update(values)
    return cfg


def figure_panels(name: str) -> dict:
    """Datasets reproducing the data behind one figure, keyed by panel."""
    om = 3.0
    panels = {}
    if name == "fig2":
        for label, a, b in (("dispersive", 0.4, 0.0), ("dissipative", 0.0, 0.4)):
            cfg = _preset(A=a, B=b, gamma=om / 1e5)
            cfg.grids["delta"] = Grid(-3 * om, 3 * om, 601)
            panels[label] = cmd_damping(cfg)
    elif name == "fig3":
        cfg = _preset(A=0.0, B=0.4, gamma=om / 1e5)
        cfg.grids["delta"] = Grid(-2 * om, 2 * om, 201)
        cfg.grids["omega"] = Grid(-2 * om, 0.0, 301)
        panels["a"] = cmd_spectrum(cfg)[0]
        for label, ratios in (("b", (0.55, 0.5, 0.45)), ("c", (-0.9, -1.0, -1.1, -1.2, -1.3))):
            parts = []
            for r in ratios:
                sub = _preset(A=0.0, B=0.4, gamma=om / 1e5, delta=r * om)
                sub.grids["omega"] = Grid(-2 * om, 0.0, 2001)
                parts.append(cmd_spectrum(sub)[0])
            panels[label] = _stack(parts)
    elif name == "fig4":
        for label, a, b in (("a", 0.4, 0.0), ("b", 0.0, 0.4)):
            cfg = _preset(A=a, B=b, gamma=om / 1e5)
            cfg.grids["delta"] = Grid(-2 * om, 2 * om, 201)
            cfg.grids["omega"] = Grid(-2 * om, 2 * om, 401)
            panels[label] = cmd_spectrum(cfg, "output")[0]
    elif name == "fig5":
        for label, key in (("a_dissipative", "B"), ("a_dispersive", "A")):
            cfg = _preset(gamma=om / 1e5, delta=-om)
            cfg.grids[key] = Grid(0.0, 0.5, 251)
            panels[label] = cmd_modes(cfg)
        parts = []
        for b in (0.1, 0.2, 0.3, 0.4):
            sub = _preset(B=b, gamma=om / 1e5, delta=-om)
            sub.grids["omega"] = Grid(-2 * om, 0.0, 2001)
            parts.append(cmd_spectrum(sub)[0])
        panels["b"] = _stack(parts, key="B")
    elif name == "fig6":
        for label, a, b in (("a", 0.1, 0.0), ("b", 0.4, 0.0), ("c", 0.0, 0.1), ("d", 0.0, 0.4)):
            cfg = _preset(A=a, B=b, gamma=om / 1e5, delta=-om)
            cfg.grids["delta_probe"] = Grid(-2 * om, 2 * om, 4001)
            panels[label] = cmd_omit(cfg)[0]
    else:
        raise ConfigError(f"unknown figure {name!r}")
    return panels


def _stack(parts, key: str = "delta") -> Dataset:
    cols = {k: [] for k in parts[0].columns}
    tags = []
    for part in parts:
        for k in cols:
            cols[k].extend(part.columns[k])
        tags.append(part.header.get(key, "?"))
    header = dict(parts[0].header)
    header[key] = ",".join(tags)
    merged = Dataset(parts[0].command, header, {key: [], **cols} if key not in cols else cols)
    if key not in parts[0].columns:
        merged.columns[key] = [t for part, t in zip(parts, tags) for _ in part.columns["omega"]]
    return merged


# ---------------------------------------------------------------- entry point

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value parameter file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config entry (repeatable)")
    common.add_argument("--out", type=Path, help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--mode", choices=MODES, help="detuning-sweep semantics")

    parser = argparse.ArgumentParser(prog="omdiss", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("damping", parents=[common], help="weak-coupling damping and shift vs detuning")
    sp = sub.add_parser("spectrum", parents=[common], help="exact spectra vs frequency")
    sp.add_argument("--kind", choices=spectra.KINDS, default="mechanical")
    sp.add_argument("--verify", action="store_true", help="add oracle columns; exit 3 on mismatch")
    sp.add_argument("--require-stable", action="store_true")
    sub.add_parser("stability", parents=[common], help="stability map over detuning and coupling")
    sub.add_parser("modes", parents=[common], help="normal-mode energies vs coupling or detuning")
    op = sub.add_parser("omit", parents=[common], help="probe response vs probe detuning")
    op.add_argument("--require-stable", action="store_true")
    vp = sub.add_parser("verify", parents=[common], help="oracle battery over random stable points")
    vp.add_argument("--cases", type=int, default=40)
    vp.add_argument("--seed", type=int, default=20240917)
    vp.add_argument("--rtol-factor", type=float, default=1.0,
                    help="scale all tolerances (0 forces failure)")
    fp = sub.add_parser("figure", parents=[common], help="datasets behind a figure")
    fp.add_argument("name", choices=("fig2", "fig3", "fig4", "fig5", "fig6"))
    return parser


def _load_config(args) -> RunConfig:
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        cfg = parse_config(text, str(args.config))
    else:
        cfg = RunConfig()
    for k, item in enumerate(args.set):
        apply_setting(cfg, item, f"--set[{k}]")
    if args.mode:
        cfg.mode = args.mode
    return cfg


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _render(ds: Dataset, fmt: str) -> str:
    return ds.to_json() if fmt == "json" else ds.to_csv()


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "damping":
            _emit(_render(cmd_damping(cfg), args.format), args.out)
        elif args.command == "spectrum":
            ds, worst, unstable = cmd_spectrum(cfg, args.kind, args.verify)
            _emit(_render(ds, args.format), args.out)
            if args.verify and worst > verification.SPECTRA_RTOL:
                print(f"verification failed: max relative error {worst:.3e}", file=sys.stderr)
                return EXIT_VERIFY
            if args.require_stable and unstable:
                print("unstable operating point", file=sys.stderr)
                return EXIT_UNSTABLE
        elif args.command == "stability":
            _emit(_render(cmd_stability(cfg), args.format), args.out)
        elif args.command == "modes":
            _emit(_render(cmd_modes(cfg), args.format), args.out)
        elif args.command == "omit":
            ds, stable = cmd_omit(cfg)
            _emit(_render(ds, args.format), args.out)
            if args.require_stable and not stable:
                print("unstable operating point", file=sys.stderr)
                return EXIT_UNSTABLE
        elif args.command == "verify":
            report, ok = cmd_verify(args.cases, args.seed, args.rtol_factor)
            _emit(report, args.out)
            return EXIT_OK if ok else EXIT_VERIFY
        elif args.command == "figure":
            panels = figure_panels(args.name)
            if args.out is None:
                sys.stdout.write("\n".join(f"# panel={k}\n" + _render(v, args.format)
                                           for k, v in panels.items()))
            else:
                for k, ds in panels.items():
                    target = args.out.with_name(f"{args.out.stem}_{k}{args.out.suffix}")
                    target.write_text(_render(ds, args.format))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
