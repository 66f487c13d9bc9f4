"""Command-line front end.

Each subcommand reads a JSON config (``--config PATH``) or a bundled preset
(``--preset NAME``), writes CSV/JSON data into ``--out`` together with a
``manifest.json``, and optionally renders SVG figures (``--svg``).

Exit codes: 0 success, 2 bad config, 3 numerical failure, 4 internal
consistency violation.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .disorder import build_disordered_chain, decay_rate_stats, zero_mode
from .edge import edge_candidates, edge_spectrum, homotopy_sweep, open_limit, open_limit_distance
from .errors import ConfigError, ConsistencyError, NumericalError
from .fdm import (
    assemble_fdm_cell,
    b0_convergence,
    band_intervals,
    distance_to_bands,
    first_gap,
    gap_fraction_grid,
    impedance_curve,
)
from .interface import (
    assemble_interface,
    classify_parity,
    common_coupling_match,
    edge_induced_mode,
    gap_edge_points,
    matched_function,
    matched_interface_roots,
)
from .io import (
    chain_from_json,
    complex_pair,
    disorder_from_json,
    fdm_from_json,
    interface_spec_from_json,
    load_json,
    parse_complex_list,
    unit_cell_from_json,
    write_csv,
    write_json,
)
from .numerics import eigs_dense, eigs_tridiagonal
from .resonators import gap_eigenvalues, generalized_capacitance, robustness_sweep
from .spectra import essential_spectrum, gamma_set, truncation_spectrum
from .symbol import UnitCell, principal_submatrices

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CONSISTENCY = 0, 2, 3, 4


class Run:
    """Output directory bookkeeping for one command invocation."""

    def __init__(self, out: Path, svg: bool):
        self.out = out
        self.svg = svg
        self.files: list[str] = []
        out.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.out / name

    def csv(self, name: str, header, rows) -> None:
        write_csv(self.path(name), header, rows)

    def json(self, name: str, data) -> None:
        write_json(self.path(name), data)


def _spectrum_rows(values: np.ndarray):
    order = np.lexsort((values.imag, values.real))
    for i, idx in enumerate(order):
        yield i, float(values[idx].real), float(values[idx].imag)


def _linear_cell(base: dict, direction: dict, t: float) -> UnitCell:
    b = unit_cell_from_json(base)
    d = unit_cell_from_json(direction) if "c" in direction else None
    da = parse_complex_list(direction["a"], "direction.a")
    db = parse_complex_list(direction["b"], "direction.b")
    dc = d.c if d is not None else db
    return UnitCell(b.a + t * da, b.b + t * db, b.c + t * dc)


def cmd_spectrum(cfg: dict, args, run: Run) -> None:
    samples = args.samples or int(cfg.get("samples", 512))
    panels = cfg.get("panels") or [dict(cfg, label="cell")]
    for panel in panels:
        label = str(panel.get("label", "cell"))
        cell = unit_cell_from_json(panel)
        ess = essential_spectrum(cell, samples)
        gam = gamma_set(cell, samples)
        run.csv(f"essential_{label}.csv", ["alpha", "branch_index", "re", "im"], ess.rows())
        run.csv(f"gamma_{label}.csv", ["alpha", "branch_index", "re", "im"], gam.rows())
        run.json(f"edges_{label}.json", [r.to_json() for r in edge_spectrum(cell)])
        if run.svg:
            from .plotting import plot_complex_plane
            plot_complex_plane(run.path(f"spectrum_{label}.svg"), list(ess.values),
                               {"sigma(B0)": edge_candidates(cell)}, title=label)
    if "homotopy" in cfg:
        h = cfg["homotopy"]
        try:
            t_grid = np.linspace(float(h["t_start"]), float(h["t_stop"]), int(h["steps"]))
            base, direction = h["base"], h["direction"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad homotopy block: {exc}") from exc
        trace = homotopy_sweep(lambda t: _linear_cell(base, direction, t), t_grid,
                               min(samples, 512))
        run.csv("homotopy.csv", ["t", "path_index", "re", "im", "abs_z", "gap_margin"],
                trace.rows())


def cmd_openlimit(cfg: dict, args, run: Run) -> None:
    samples = args.samples or int(cfg.get("samples", 1024))
    cell = unit_cell_from_json(cfg)
    n_list = [int(n) for n in cfg.get("n_list", [40, 80, 160])]
    limit = open_limit(cell, samples)
    run.csv("gamma.csv", ["alpha", "branch_index", "re", "im"], limit.gamma.rows())
    run.json("g0.json", [complex_pair(z) for z in limit.g0_points])
    rows = []
    for n in n_list:
        spec = truncation_spectrum(cell, n)
        run.csv(f"truncation_n{n}.csv", ["index", "re", "im"], spec.rows())
        d = open_limit_distance(cell, n, limit)
        rows.append((n, d.eig_to_limit, d.limit_to_eig, d.hausdorff))
    run.csv("distances.csv", ["n", "eig_to_limit", "limit_to_eig", "hausdorff"], rows)
    if run.svg:
        from .plotting import plot_complex_plane
        last = truncation_spectrum(cell, n_list[-1]).values
        plot_complex_plane(run.path("openlimit.svg"), list(limit.gamma.values),
                           {f"n={n_list[-1]}": last, "G0": limit.g0_points})


def _write_modes(run: Run, modes: list[dict], vectors: list[np.ndarray]) -> None:
    run.json("modes.json", modes)
    rows = ((i, j - w.size // 2, float(x.real), float(x.imag))
            for i, w in enumerate(vectors) for j, x in enumerate(w))
    run.csv("mode_vectors.csv", ["mode_index", "site_offset", "re", "im"], rows)
    if run.svg and vectors:
        from .plotting import plot_vector
        for i, w in enumerate(vectors):
            plot_vector(run.path(f"mode_{i}.svg"), w, modes[i]["parity"])


def _chain_interface(cfg: dict, args, run: Run) -> None:
    chain = chain_from_json(cfg["chain"])
    M = generalized_capacitance(chain)
    dec = eigs_dense(M.to_dense(), want_vectors=True)
    run.csv("spectrum.csv", ["index", "re", "im"], _spectrum_rows(dec.values))
    modes, vectors = [], []
    for lam in gap_eigenvalues(chain, dec.values):
        i = int(np.argmin(np.abs(dec.values - lam)))
        w = dec.vectors[:, i]
        omega = np.sqrt(chain.delta * lam)
        modes.append({"lambda": complex_pair(lam), "omega": complex_pair(omega),
                      "parity": classify_parity(w), "origin": "gap"})
        vectors.append(w)
    _write_modes(run, modes, vectors)
    if "sweep" in cfg:
        sw = cfg["sweep"]
        seed = args.seed if args.seed is not None else int(sw.get("seed", 0))
        rows = robustness_sweep(chain, sw["kind"], sw["values"], int(sw.get("trials", 1)), seed)
        run.csv("sweep.csv", ["param_value", "trial", "eig_index", "re", "im"], rows)
        summary = {}
        for p in sorted({r[0] for r in rows}):
            for t in sorted({r[1] for r in rows if r[0] == p}):
                vals = np.array([complex(r[3], r[4]) for r in rows if r[0] == p and r[1] == t])
                summary[f"{p!r}/{t}"] = [complex_pair(z) for z in gap_eigenvalues(chain, vals)]
        run.json("sweep_gap.json", summary)
    if run.svg:
        from .plotting import plot_complex_plane
        plot_complex_plane(run.path("spectrum.svg"), [], {"eigenvalues": dec.values})


def cmd_interface(cfg: dict, args, run: Run) -> None:
    if "chain" in cfg:
        _chain_interface(cfg, args, run)
        return
    spec = interface_spec_from_json(cfg)
    m = int(cfg.get("m", 100))
    M = assemble_interface(spec, m)
    values = eigs_tridiagonal(M).values
    run.csv("spectrum.csv", ["index", "re", "im"], _spectrum_rows(values))
    found = []
    if spec.kind == "shared_site":
        found = matched_interface_roots(spec, m_verify=m)
        if spec.q == spec.s and any(r.is_edge for r in edge_spectrum(spec.cell)):
            found = [edge_induced_mode(spec, m)] + found
    else:
        found = common_coupling_match(spec, m_verify=m)
    modes = [{"lambda": complex_pair(md.lam), "parity": md.parity, "origin": md.origin,
              "residual": md.residual,
              "truncation_distance": None if np.isnan(md.truncation_distance)
              else md.truncation_distance} for md in found]
    _write_modes(run, modes, [md.vector for md in found])
    if spec.kind == "shared_site" and spec.cell.k > 1:
        try:
            A, B = gap_edge_points(spec.cell)
        except ValueError:
            A = B = None
        if A is not None:
            n = args.samples or 201
            rows = []
            for t in np.linspace(0.0, 1.0, n + 2)[1:-1]:
                lam = A + t * (B - A)
                try:
                    F = matched_function(spec, lam)
                except NumericalError:
                    continue
                rows.append((float(t), float(lam.real), float(lam.imag), F.real, F.imag))
            run.csv("fcurve.csv", ["t", "lam_re", "lam_im", "F_re", "F_im"], rows)
    if run.svg:
        from .plotting import plot_complex_plane
        ess = essential_spectrum(spec.cell, 512)
        plot_complex_plane(run.path("spectrum.svg"), list(ess.values),
                           {"eigenvalues": values, "interface": [md.lam for md in found]})


def cmd_disorder(cfg: dict, args, run: Run) -> None:
    dcfg = disorder_from_json(cfg, args.seed)
    M = build_disordered_chain(dcfg, 0)
    values = eigs_tridiagonal(M).values
    run.csv("spectrum.csv", ["index", "re", "im"], _spectrum_rows(values))
    zm = zero_mode(M)
    c = M.n // 2
    run.csv("zero_mode.csv", ["site_offset", "re", "im"],
            ((j - c, float(x.real), float(x.imag)) for j, x in enumerate(zm.vector)))
    stats = decay_rate_stats(dcfg)
    run.csv("stats.csv", ["trial", "fitted_rate"], enumerate(stats.per_trial_rates))
    summary = stats.summary()
    summary.update(zero_mode_abs=abs(zm.lam), zero_mode_present=zm.present,
                   rate_unit="per block of k' dimer cells")
    run.json("summary.json", summary)
    if run.svg:
        from .plotting import plot_complex_plane, plot_histogram, plot_vector
        plot_complex_plane(run.path("spectrum.svg"), [], {"eigenvalues": values})
        plot_vector(run.path("zero_mode.svg"), zm.vector, "zero mode")
        plot_histogram(run.path("rates.svg"), stats.per_trial_rates, stats.theoretical)


def cmd_fdm(cfg: dict, args, run: Run) -> None:
    fcfg = fdm_from_json(cfg)
    cell = assemble_fdm_cell(fcfg)
    bands = band_intervals(cell)
    run.csv("bands.csv", ["band_index", "lo", "hi"],
            ((i, float(lo), float(hi)) for i, (lo, hi) in enumerate(bands)))
    b0 = np.linalg.eigvalsh(principal_submatrices(cell)[0].real)
    dist = distance_to_bands(b0, bands)
    run.csv("sigma_b0.csv", ["index", "value", "distance_to_band"],
            ((i, float(v), float(d)) for i, (v, d) in enumerate(zip(b0, dist))))
    if run.svg:
        from .plotting import plot_complex_plane
        segments = [np.array([lo, hi], dtype=complex) for lo, hi in bands]
        plot_complex_plane(run.path("bands.svg"), segments, {"sigma(B0)": b0.astype(complex)},
                           title=f"k = {fcfg.k}")
    k_list = [int(k) for k in cfg.get("k_list", [fcfg.k])]
    run.csv("convergence.csv", ["k", "b0_index", "re", "distance_to_band"],
            b0_convergence(fcfg, k_list, int(cfg.get("n_track", 3))))
    try:
        first_gap(fcfg)
        has_gap = True
    except ValueError:
        has_gap = False
    if has_gap:
        n = args.samples or 199
        grid = gap_fraction_grid(fcfg, np.linspace(0.0, 1.0, n + 2)[1:-1])
        rows = impedance_curve(fcfg, grid)
        run.csv("impedance.csv", ["omega2", "reF", "imF"], rows)
        if run.svg:
            from .plotting import plot_lines
            arr = np.array(rows)
            plot_lines(run.path("impedance.svg"), arr[:, 0], {"Re F": arr[:, 1]}, "omega^2")


COMMANDS: dict[str, Callable] = {
    "spectrum": cmd_spectrum,
    "openlimit": cmd_openlimit,
    "interface": cmd_interface,
    "disorder": cmd_disorder,
    "fdm": cmd_fdm,
}


def list_presets() -> list[str]:
    root = resources.files("ktoeplitz") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> dict:
    res = resources.files("ktoeplitz") / "presets" / f"{name}.json"
    if not res.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return json.loads(res.read_text(encoding="utf-8"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ktoeplitz", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("presets", help="list bundled presets")
    for name in COMMANDS:
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", type=Path)
        src.add_argument("--preset")
        p.add_argument("--out", type=Path, default=Path("out"))
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--svg", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG
    if args.command == "presets":
        for name in list_presets():
            desc = load_preset(name).get("description", "")
            print(f"{name:34s} {desc}")
        return EXIT_OK
    try:
        if args.samples is not None and args.samples < 8:
            raise ConfigError("--samples must be at least 8")
        cfg = load_preset(args.preset) if args.preset else load_json(args.config)
        wanted = cfg.get("command")
        if wanted is not None and wanted != args.command:
            raise ConfigError(f"config is meant for the {wanted!r} command")
        run = Run(args.out, args.svg)
        COMMANDS[args.command](cfg, args, run)
        manifest = {
            "command": args.command,
            "config": f"preset:{args.preset}" if args.preset else str(args.config),
            "out": str(args.out),
            "seed": args.seed,
            "version": __version__,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
            "files": sorted(run.files),
        }
        write_json(args.out / "manifest.json", manifest)
    except ConsistencyError as exc:
        print(f"internal consistency error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
