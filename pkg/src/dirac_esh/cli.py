"""``dirac-esh`` command-line front end.

Each subcommand resolves its settings as defaults, then the JSON config
(``--config``), then explicit flags, runs one pipeline and writes CSV/SVG
panels, an optional ``summary.json`` and ``manifest.json`` into ``--out``.

Exit status: 0 success, 1 configuration error, 2 numerical precondition
failure (including a failed ``selftest``).
"""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from . import corrfluct as cf
from . import entmap as em
from . import models as mdl
from . import topo
from .errors import ConfigError, GaplessError, PreconditionError
from .export import Panel, write_outputs
from .numerics import DEFAULT_TRANSVERSE, BzGrid

logger = logging.getLogger("dirac_esh")

MODEL_DEFAULTS = {
    "qwz": dict(m=1.0, t_x=1.0, t_y=1.0),
    "qh4d": dict(m=1.0),
    "wti": dict(t_x=1.0, t_x_prime=4.0, t_y=1.0),
    "continuum": dict(m=1.0, cutoff=100.0),
}
_PARAM_FLAGS = ("m", "t_x", "t_y", "t_x_prime", "cutoff")

# per-command settings with their defaults; flags and config keys share these names
COMMON = dict(out="out", formats="csv,svg,json")
MODEL_OPTS = dict(model="qwz", params=None, kept="0", L=64, transverse=None)
COMMANDS = {
    "esh": dict(MODEL_OPTS),
    "corr-spectrum": dict(MODEL_OPTS),
    "variance-scan": dict(MODEL_OPTS, m_range="-3:3:0.05", method="momentum",
                          lattice="5x10", boundary="open", row="y=5", start=0, length=None),
    "topo": dict(dims="0,1,2,3,4", m_range="-5:5:0.05", derivative="central", grid=None),
    "wti": dict(params=None, size=60, segment=30),
    "time-corr": dict(MODEL_OPTS, k=0.0, t_range="0:20:0.1"),
    "fig2": dict(L=128, transverse=None),
    "fig3": dict(L=64, transverse=None),
    "fig4": dict(dims="0,1,2,3,4", m_range="-5:5:0.05", derivative="spectral", grid="64,48,24,16"),
    "fig5": dict(panel="all", m_range="-3:3:0.05", L=64, transverse=None),
    "fig6": dict(tp_range="0:6:0.05", t_x=3.0, t_y=0.5, size=60, segment=30),
    "selftest": dict(),
}


# ---------------------------------------------------------------------------
# parsing helpers

def parse_range(text, field: str = "range") -> np.ndarray:
    """``"a:b:step"`` (inclusive) or a comma list into a float array."""
    if isinstance(text, (list, tuple)):
        return np.asarray(text, dtype=float)
    try:
        if ":" in str(text):
            a, b, step = (float(x) for x in str(text).split(":"))
            if step <= 0 or b < a:
                raise ValueError
            n = int(np.floor((b - a) / step + 1e-9)) + 1
            return np.round(a + step * np.arange(n), 10)
        vals = np.asarray([float(x) for x in str(text).split(",") if x.strip()], dtype=float)
    except ValueError:
        raise ConfigError(f"field '{field}': cannot parse range {text!r} (expected a:b:step)") from None
    if vals.size == 0:
        raise ConfigError(f"field '{field}': empty range")
    return vals


def parse_ints(text, field: str) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    try:
        return [int(x) for x in str(text).replace("x", ",").split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"field '{field}': expected integers, got {text!r}") from None


def parse_params(items) -> dict:
    if items is None:
        return {}
    if isinstance(items, dict):
        return {k: float(v) for k, v in items.items()}
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"field 'param': expected key=value, got {item!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"field 'param': value of {key!r} is not a number") from None
    return out


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def resolve(command: str, args: argparse.Namespace, config: dict) -> dict:
    """Defaults, then config, then explicit flags."""
    allowed = dict(COMMON, **COMMANDS[command])
    for key in config:
        if key not in allowed and key not in ("command",) + _PARAM_FLAGS:
            raise ConfigError(f"config: unknown field '{key}' for command '{command}'")
    settings = dict(allowed)
    params = dict(parse_params(config.get("params")))
    for key in _PARAM_FLAGS:
        if key in config and key not in allowed:
            params[key] = float(config[key])
    for key, value in config.items():
        if key in allowed and key != "params":
            settings[key] = value
    for key in allowed:
        value = getattr(args, key, None)
        if value is not None and key != "params":
            settings[key] = value
    params.update(parse_params(getattr(args, "params", None)))
    for key in _PARAM_FLAGS:
        value = getattr(args, key, None)
        if value is not None and key not in allowed:
            params[key] = value
    settings["params"] = params
    return settings


def build_model(settings: dict) -> mdl.DiracModel:
    name = settings.get("model", "qwz")
    if name not in MODEL_DEFAULTS:
        raise ConfigError(f"field 'model': unknown model {name!r}; choose from {sorted(MODEL_DEFAULTS)}")
    params = dict(MODEL_DEFAULTS[name])
    unknown = set(settings["params"]) - set(params)
    if unknown:
        raise ConfigError(f"field 'params': {sorted(unknown)} not accepted by model {name!r}")
    params.update(settings["params"])
    return mdl.make_model(name, **params)


def subsystem(settings: dict, model: mdl.DiracModel) -> em.SubsystemSpec:
    kept = tuple(parse_ints(settings["kept"], "kept"))
    n_traced = model.D - len(kept)
    if n_traced < 1:
        raise ConfigError("field 'kept': must leave at least one traced axis")
    tr = settings.get("transverse")
    size = int(tr) if tr is not None else DEFAULT_TRANSVERSE[n_traced]
    return em.SubsystemSpec(kept, BzGrid((size,) * n_traced))


# ---------------------------------------------------------------------------
# pipelines; each returns (panels, summary)

def run_esh(s):
    model = build_model(s)
    spec = subsystem(s, model)
    grid = BzGrid((int(s["L"]),) * len(spec.kept_axes))
    r = em.esh_grid(model, spec, grid)
    header = [f"k_{a}" for a in spec.kept_axes] + [f"d_{i}" for i in range(model.N)] + ["F", "delta_m", "T"]
    rows = np.column_stack([r.k_s.T, r.d.T, r.F, r.delta_m, r.T])
    panel = Panel("esh", header, rows, x=header[0], y=("delta_m", "T"), ylabel="energy", title="ESH")
    return [panel], {"clamped_points": int(r.clamped.sum())}


def run_corr_spectrum(s):
    model = build_model(s)
    spec = subsystem(s, model)
    grid = BzGrid((int(s["L"]),) * len(spec.kept_axes))
    r = em.esh_grid(model, spec, grid)
    spec_rows = cf.correlation_spectrum(r, model.rep)
    T_mean = em.constant_temperature(r)
    from .numerics import fermi
    nf_const = fermi(spec_rows[:, 2], T_mean)
    rows = np.column_stack([spec_rows, nf_const])
    panel = Panel("spectrum", ["point", "xi", "E", "n_F", "n_F_mean_T"], rows, x="E",
                  y=("xi", "n_F_mean_T"), ylabel="occupation", title="correlation spectrum")
    return [panel], {"T_mean": T_mean}


def _ed_geometry(s) -> mdl.LatticeGeometry:
    sizes = tuple(parse_ints(s["lattice"], "lattice"))
    if len(sizes) != 2:
        raise ConfigError("field 'lattice': expected LxxLy")
    axis_name, _, value = str(s["row"]).partition("=")
    if axis_name not in ("x", "y") or not value:
        raise ConfigError("field 'row': expected x=<int> or y=<int> (the fixed coordinate)")
    fixed_axis = 0 if axis_name == "x" else 1
    along = 1 - fixed_axis
    sites = mdl.row(sizes, along, {fixed_axis: int(value)}, int(s["start"]),
                    None if s["length"] is None else int(s["length"]))
    return mdl.LatticeGeometry(sizes, s["boundary"], sites)


def run_variance_scan(s):
    ms = parse_range(s["m_range"], "m_range")
    name = s.get("model", "qwz")
    if name != "qwz":
        raise ConfigError("variance-scan supports the qwz model")
    base = dict(MODEL_DEFAULTS["qwz"], **s["params"])
    method = s["method"]
    rows = []
    if method == "momentum":
        tr = int(s["transverse"] or DEFAULT_TRANSVERSE[1])
        spec = em.SubsystemSpec((0,), BzGrid((tr,), offset=0.5))
        for m in ms:
            exact, thermal, T_mean = cf.chain_variance(mdl.qwz(m, base["t_x"], base["t_y"]), spec, int(s["L"]))
            rows.append((m, exact, thermal, T_mean))
        header = ["m", "dN2", "dN2_mean_T", "T_mean"]
        y = ("dN2", "dN2_mean_T")
    elif method == "ed":
        geom = _ed_geometry(s)
        for m in ms:
            c = cf.realspace_corr(mdl.qwz(m, base["t_x"], base["t_y"]), geom)
            rows.append((m, cf.particle_variance(c)))
        header = ["m", "dN2"]
        y = ("dN2",)
    else:
        raise ConfigError(f"field 'method': expected momentum or ed, got {method!r}")
    panel = Panel("variance", header, np.asarray(rows), x="m", y=y, ylabel="Delta N^2",
                  title=f"number variance (t_y={base['t_y']})")
    return [panel], {}


def _topo_table(dims, ms, derivative, grids):
    panels, critical = [], {}
    for d in dims:
        rows = []
        L = grids.get(d)
        for m in ms:
            try:
                r = topo.esh_invariant(float(m), d, L=L, method=derivative)
            except GaplessError:
                # ESH or parent closes its gap here: the invariant is undefined
                rows.append((m, np.nan, np.nan, 0.0))
                continue
            rows.append((m, r.nu_raw, r.nu, float(r.accepted)))
        panels.append(Panel(f"topo_d{d}", ["m", "nu_raw", "nu", "accepted"], np.asarray(rows), x="m",
                            y=("nu_raw",), ylabel=f"nu_{d}", title=f"invariant of the {d}D descendant"))
        if d >= 1:
            critical[str(d)] = topo.gap_scan(d, ms)
    return panels, {"critical_m": critical}


def _grid_map(text, dims):
    if text is None:
        return {}
    sizes = parse_ints(text, "grid")
    if len(sizes) == 1:
        return {d: sizes[0] for d in dims}
    if len(sizes) != 4:
        raise ConfigError("field 'grid': give one size or four (for d = 1..4)")
    return {d: sizes[d - 1] for d in range(1, 5)}


def run_topo(s):
    dims = parse_ints(s["dims"], "dims")
    if any(not 0 <= d <= 4 for d in dims):
        raise ConfigError("field 'dims': dimensions must lie in 0..4")
    if s["derivative"] not in ("central", "spectral"):
        raise ConfigError("field 'derivative': expected central or spectral")
    ms = parse_range(s["m_range"], "m_range")
    return _topo_table(dims, ms, s["derivative"], _grid_map(s["grid"], dims))


def _cut_spectrum(model, kept, size, segment):
    spec = em.SubsystemSpec((kept,), BzGrid((size,)))
    return cf.segment_corr(model, spec, size, range(segment)).spectrum()


def run_wti(s):
    p = dict(MODEL_DEFAULTS["wti"], **s["params"])
    model = mdl.wti(p["t_x"], p["t_x_prime"], p["t_y"])
    size, segment = int(s["size"]), int(s["segment"])
    summary = {"phase": mdl.wti_phase(p["t_x"], p["t_x_prime"], p["t_y"])}
    wi = topo.weak_indices(model)
    summary["weak_indices"] = [wi.nu_x, wi.nu_y]
    summary["esh_winding_x"] = topo.esh_winding(model, 0).winding
    summary["esh_winding_y"] = topo.esh_winding(model, 1).winding
    panels = []
    for name, kept in (("x_cut", 0), ("y_cut", 1)):
        xi = _cut_spectrum(model, kept, size, segment)
        panels.append(Panel(name, ["index", "xi"], np.column_stack([np.arange(xi.size), xi]), x="index",
                            y=("xi",), ylabel="xi", title=f"{name} correlation spectrum"))
        summary[f"{name}_midgap"] = int(np.sum(np.abs(xi - 0.5) < 0.05))
    return panels, summary


def run_time_corr(s):
    model = build_model(s)
    spec = subsystem(s, model)
    k = np.atleast_1d(np.asarray(parse_range(str(s["k"]), "k"), dtype=float))
    ts = parse_range(s["t_range"], "t_range")
    c0 = cf.time_corr(model, spec, k, 0.0)
    rows = []
    for t in ts:
        ct = cf.time_corr(model, spec, k, float(t))
        rows.append((t, cf.time_departure(model, spec, k, float(t)), float(np.linalg.norm(ct - c0, ord=2))))
    panel = Panel("time_corr", ["t", "departure", "drift"], np.asarray(rows), x="t",
                  y=("departure", "drift"), ylabel="operator norm", title="time correlation")
    return [panel], {"bandwidth": cf.transverse_bandwidth(model, spec, k)}


FIG2_MASSES = (0.5, 1.0, 1.4, 1.8)
FIG2_MASS_TY = 1.0
FIG2_HOPPINGS = (0.2, 0.5, 1.0)
FIG2_HOPPING_M = 1.4


def run_fig2(s):
    L = int(s["L"])
    tr = int(s["transverse"] or DEFAULT_TRANSVERSE[1])
    spec = em.SubsystemSpec((0,), BzGrid((tr,)))
    grid = BzGrid((L,))
    k = grid.axis(0)
    by_m = [em.esh_grid(mdl.qwz(m, 1.0, FIG2_MASS_TY), spec, grid) for m in FIG2_MASSES]
    by_t = [em.esh_grid(mdl.qwz(FIG2_HOPPING_M, 1.0, t), spec, grid) for t in FIG2_HOPPINGS]
    hm = ["k_x"] + [f"m={m:g}" for m in FIG2_MASSES]
    ht = ["k_x"] + [f"t_y={t:g}" for t in FIG2_HOPPINGS]
    panels = [
        Panel("fig2a", hm, np.column_stack([k] + [r.delta_m for r in by_m]), ylabel="delta m",
              title=f"mass shift, t_y={FIG2_MASS_TY:g}"),
        Panel("fig2b", ht, np.column_stack([k] + [r.delta_m for r in by_t]), ylabel="delta m",
              title=f"mass shift, m={FIG2_HOPPING_M:g}"),
        Panel("fig2c", hm, np.column_stack([k] + [r.T for r in by_m]), ylabel="T",
              title=f"entanglement temperature, t_y={FIG2_MASS_TY:g}"),
        Panel("fig2d", ht, np.column_stack([k] + [r.T for r in by_t]), ylabel="T",
              title=f"entanglement temperature, m={FIG2_HOPPING_M:g}"),
    ]
    return panels, {}


FIG3_SETS = ((1.0, 0.5), (0.2, 0.1))  # (t_y, quoted temperature)


def run_fig3(s):
    from .numerics import fermi
    L = int(s["L"])
    tr = int(s["transverse"] or DEFAULT_TRANSVERSE[1])
    spec = em.SubsystemSpec((0,), BzGrid((tr,)))
    panels, summary = [], {}
    for label, m in (("fig3a", 1.0), ("fig3b", 1.4)):
        rows = []
        for t_y, T_quoted in FIG3_SETS:
            model = mdl.qwz(m, 1.0, t_y)
            r = em.esh_grid(model, spec, BzGrid((L,)))
            T_mean = em.constant_temperature(r)
            summary[f"{label}_t_y={t_y:g}_T_mean"] = T_mean
            sp = cf.correlation_spectrum(r, model.rep)
            for _, xi, E, _nf in sp:
                rows.append((t_y, E, xi, float(fermi(E, T_mean)), float(fermi(E, T_quoted))))
        rows = np.asarray(sorted(rows))
        panels.append(Panel(label, ["t_y", "E", "xi", "n_F_mean_T", "n_F_quoted_T"], rows, x="E",
                            y=("xi", "n_F_mean_T"), ylabel="occupation", title=f"{label}: m={m:g}"))
    return panels, summary


def run_fig4(s):
    return run_topo(s)


def run_fig5(s):
    wanted = str(s["panel"]).lower()
    if wanted != "all" and wanted not in "abcdef":
        raise ConfigError("field 'panel': expected one of a-f or all")
    ms = parse_range(s["m_range"], "m_range")
    L = int(s["L"])
    tr = int(s["transverse"] or DEFAULT_TRANSVERSE[1])
    spec = em.SubsystemSpec((0,), BzGrid((tr,), offset=0.5))
    panels = []
    for spec_panel, var_panel, ed_panel, t_y in (("a", "c", "e", 1.0), ("b", "d", "f", 0.5)):
        if wanted in ("all", spec_panel):
            rows = [np.concatenate([[m], np.sort(np.concatenate([
                0.5 * (1 - r.x), 0.5 * (1 + r.x)]))])
                for m in ms for r in [em.esh_grid(mdl.qwz(m, 1.0, t_y), spec, BzGrid((L,)))]]
            header = ["m"] + [f"xi_{i}" for i in range(2 * L)]
            panels.append(Panel(f"fig5{spec_panel}", header, np.asarray(rows), x="m", ylabel="xi",
                                title=f"correlation spectrum, t_y={t_y:g}"))
        if wanted in ("all", var_panel):
            rows = [(m,) + cf.chain_variance(mdl.qwz(m, 1.0, t_y), spec, L)[:2] for m in ms]
            panels.append(Panel(f"fig5{var_panel}", ["m", "dN2", "dN2_mean_T"], np.asarray(rows), x="m",
                                ylabel="Delta N^2", title=f"chain variance, t_y={t_y:g}"))
        if wanted in ("all", ed_panel):
            geom = mdl.LatticeGeometry((5, 10), "open", mdl.row((5, 10), 0, {1: 5}))
            rows = [(m, cf.particle_variance(cf.realspace_corr(mdl.qwz(m, 1.0, t_y), geom))) for m in ms]
            panels.append(Panel(f"fig5{ed_panel}", ["m", "dN2"], np.asarray(rows), x="m",
                                ylabel="Delta N^2", title=f"5x10 open lattice, t_y={t_y:g}"))
    return panels, {}


def run_fig6(s):
    tps = parse_range(s["tp_range"], "tp_range")
    size, segment = int(s["size"]), int(s["segment"])
    panels = []
    for label, kept in (("fig6a", 0), ("fig6b", 1)):
        rows = []
        for tp in tps:
            model = mdl.wti(float(s["t_x"]), float(tp), float(s["t_y"]))
            try:
                xi = _cut_spectrum(model, kept, size, segment)
            except PreconditionError:
                xi = np.full(2 * segment, np.nan)
            rows.append(np.concatenate([[tp], xi]))
        header = ["t_x_prime"] + [f"xi_{i}" for i in range(2 * segment)]
        panels.append(Panel(label, header, np.asarray(rows), x="t_x_prime", ylabel="xi",
                            title=f"{'x' if kept == 0 else 'y'}-cut spectrum"))
    return panels, {"phase_boundaries": [abs(float(s["t_x"]) - 2 * float(s["t_y"])),
                                         float(s["t_x"]) + 2 * float(s["t_y"])]}


def run_selftest(s):
    from .selftest import run_all
    results = run_all()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    failed = [name for name, ok, _ in results if not ok]
    if failed:
        raise PreconditionError(f"selftest failed: {', '.join(failed)}")
    return [], {"checks": {name: ok for name, ok, _ in results}}


PIPELINES: dict[str, Callable] = {
    "esh": run_esh,
    "corr-spectrum": run_corr_spectrum,
    "variance-scan": run_variance_scan,
    "topo": run_topo,
    "wti": run_wti,
    "time-corr": run_time_corr,
    "fig2": run_fig2,
    "fig3": run_fig3,
    "fig4": run_fig4,
    "fig5": run_fig5,
    "fig6": run_fig6,
    "selftest": run_selftest,
}


# ---------------------------------------------------------------------------

def _add_model_flags(p):
    p.add_argument("--model", choices=sorted(MODEL_DEFAULTS), default=None)
    p.add_argument("--param", dest="params", action="append", default=None, metavar="KEY=VALUE",
                   help="model parameter, repeatable (m, t_x, t_y, t_x_prime, cutoff)")
    for key in _PARAM_FLAGS:
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand's unset copy from masking a value given before it
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON config; explicit flags override it")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory (default: out)")
    common.add_argument("--formats", default=argparse.SUPPRESS, help="comma list of csv, svg, json")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="dirac-esh", description=__doc__.splitlines()[0],
                                     parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command")

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    for name, text in (("esh", "ESH vector, F, mass shift and temperature over k_s"),
                       ("corr-spectrum", "correlation spectrum paired with ESH levels")):
        p = add(name, text)
        _add_model_flags(p)
        p.add_argument("--kept", default=None, help="kept axes, e.g. 0 or 0,1")
        p.add_argument("--L", type=int, default=None, help="points per kept axis")
        p.add_argument("--transverse", type=int, default=None, help="points per traced axis")

    p = add("variance-scan", "Delta N^2 versus m for a QWZ chain")
    p.add_argument("--param", dest="params", action="append", default=None, metavar="KEY=VALUE")
    p.add_argument("--t-x", dest="t_x", type=float, default=None)
    p.add_argument("--t-y", dest="t_y", type=float, default=None)
    p.add_argument("--m", dest="m_range", default=None, help="a:b:step")
    p.add_argument("--method", choices=("momentum", "ed"), default=None)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--transverse", type=int, default=None)
    p.add_argument("--lattice", default=None, help="ED lattice, e.g. 5x10")
    p.add_argument("--boundary", choices=("open", "periodic"), default=None)
    p.add_argument("--row", default=None, help="fixed coordinate of the subsystem row, e.g. y=5")
    p.add_argument("--start", type=int, default=None)
    p.add_argument("--length", type=int, default=None)

    for name, text in (("topo", "invariants of the 4D model and its descendants"),
                       ("fig4", "invariant dataset versus m (coarse spectral defaults)")):
        p = add(name, text)
        p.add_argument("--dims", default=None, help="e.g. 0,1,2,3,4")
        p.add_argument("--m", dest="m_range", default=None, help="a:b:step")
        p.add_argument("--derivative", choices=("central", "spectral"), default=None)
        p.add_argument("--grid", default=None, help="points per axis: one value or four (d=1..4)")

    p = add("wti", "weak indices and x/y cut spectra of the weak-TI stack")
    p.add_argument("--param", dest="params", action="append", default=None, metavar="KEY=VALUE")
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--segment", type=int, default=None)

    p = add("time-corr", "departure of C(t) from the thermal ESH evolution")
    _add_model_flags(p)
    p.add_argument("--kept", default=None)
    p.add_argument("--transverse", type=int, default=None)
    p.add_argument("--k", default=None, help="subsystem momentum")
    p.add_argument("--t", dest="t_range", default=None, help="a:b:step")

    for name in ("fig2", "fig3"):
        p = add(name, f"{name} dataset")
        p.add_argument("--L", type=int, default=None)
        p.add_argument("--transverse", type=int, default=None)
    p = add("fig5", "correlation spectra and number variances")
    p.add_argument("--panel", default=None, help="a-f or all")
    p.add_argument("--m", dest="m_range", default=None)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--transverse", type=int, default=None)
    p = add("fig6", "weak-TI cut spectra versus t'_x")
    p.add_argument("--tp", dest="tp_range", default=None, help="a:b:step")
    p.add_argument("--t-x", dest="t_x", type=float, default=None)
    p.add_argument("--t-y", dest="t_y", type=float, default=None)
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--segment", type=int, default=None)
    add("selftest", "run the property suite")
    return parser


_NEGATIVE_VALUE = re.compile(r"^-[0-9.]")


def _attach_negative_values(argv: list[str]) -> list[str]:
    """Rewrite ``--opt -5:5:0.1`` as ``--opt=-5:5:0.1`` so ranges may start below zero."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NEGATIVE_VALUE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    argv = _attach_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(getattr(args, "config", None))
        command = args.command or config.get("command")
        if command is None:
            raise ConfigError("no command given (on the command line or as 'command' in the config)")
        if command not in PIPELINES:
            raise ConfigError(f"config: unknown command {command!r}")
        if args.command is None:
            args = parser.parse_args([command] + argv)
        settings = resolve(command, args, config)
        formats = [f.strip() for f in str(settings["formats"]).split(",") if f.strip()]
        if set(formats) - {"csv", "svg", "json"}:
            raise ConfigError(f"field 'formats': unsupported {sorted(set(formats) - {'csv', 'svg', 'json'})}")
        panels, summary = PIPELINES[command](settings)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except PreconditionError as exc:
        print(f"numerical precondition failed: {exc}", file=sys.stderr)
        return 2
    if command != "selftest" or panels:
        inputs = {"command": command, "version": __version__,
                  "settings": {k: v for k, v in settings.items() if k not in ("out", "formats")}}
        manifest = write_outputs(Path(settings["out"]), panels, formats, summary, inputs)
        print(f"wrote {len(panels)} panel(s); manifest {manifest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
