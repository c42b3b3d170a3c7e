"""Experiment-runner CLI: deterministic pipelines with manifest reports.

Every subcommand resolves its configuration (defaults < --config file <
explicit flags), runs single-threaded numeric pipelines per replicate, and
writes CSV grids plus JSON summaries and a manifest into the output
directory.  The manifest embeds the fully resolved configuration (including
the potential/SFT file contents), so any report can be regenerated by
passing the manifest back through --config.  Floats are written with 12
significant digits; given the same seed the bodies are byte-identical
regardless of --threads.
"""

from __future__ import annotations

import hashlib
import json
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import __version__
from .covering import circle_cover_report, estimate_dims, subword_census
from .experiments import (
    late_hit_experiment,
    multi_early_hit_experiment,
    tree_failure_experiment,
)
from .hitting import NOT_FOUND, hitting_times, star_hitting_times
from .spectrum import Spectrum, predict_cover
from .sft import SftSpec, SftSystem, sft_predict
from .symbolic import CirclePoint, Word, neighbor_cylinders
from .thermo import (
    Potential,
    cylinder_measure,
    gibbs_chain,
    log2_measures_of_codes,
    normalize,
    pressure,
    sample_orbit,
    stream,
)
from .typicality import cantor_lower_bound, tree_counts

DEFAULT_OUT = "thcover-out"


def fmt(x) -> str:
    """Fixed 12-significant-digit float formatting for all emitted numbers."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    xf = float(x)
    if np.isnan(xf):
        return "nan"
    return f"{xf:.12g}"


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        xf = float(obj)
        return None if np.isnan(xf) else float(fmt(xf))
    if isinstance(obj, np.ndarray):
        return [_json_ready(v) for v in obj.tolist()]
    return obj


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_json_ready(obj), sort_keys=True, indent=2) + "\n")


def config_digest(config: dict) -> str:
    canon = json.dumps(_json_ready(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def write_manifest(out: Path, kind: str, config: dict, elapsed: float) -> None:
    manifest = {
        "kind": kind,
        "config": config,
        "config_sha256": config_digest(config),
        "package_version": __version__,
        "wallclock_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "elapsed_seconds": elapsed,
    }
    write_json(out / "manifest.json", manifest)


# ---------------------------------------------------------------------------
# configuration plumbing


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise click.UsageError(f"cannot read config {path}: {e}")
    if isinstance(data, dict) and "config" in data and "kind" in data:
        data = data["config"]  # a manifest; unwrap
    if not isinstance(data, dict):
        raise click.UsageError(f"config {path} must hold a JSON object")
    return data


def _resolve(ctx: click.Context, defaults: dict, flags: dict) -> dict:
    """defaults < config file < group flags < subcommand flags."""
    config = dict(defaults)
    config.update({k: v for k, v in ctx.obj["file_config"].items()})
    for k in ("seed", "threads", "out"):
        if ctx.obj.get(k) is not None:
            config[k] = ctx.obj[k]
    if ctx.obj.get("potential") is not None:
        config["potential_text"] = _read_input_file(ctx.obj["potential"])
    for k, v in flags.items():
        if v is not None:
            config[k] = v
    return config


def _read_input_file(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise click.UsageError(f"cannot read {path}: {e}")


def _require_potential(config: dict) -> Potential:
    text = config.get("potential_text")
    if not text:
        raise click.UsageError("a potential file is required (--potential)")
    try:
        pot = Potential.from_text(text)
    except ValueError as e:
        raise click.UsageError(f"bad potential file: {e}")
    if not pot.normalized:
        pot = normalize(pot)
    return pot


def _parse_grid(spec_str: str) -> list[int]:
    """Parse '12:18' (inclusive range) or '12,14,16' into a list of ints."""
    s = str(spec_str).strip()
    try:
        if ":" in s:
            lo, hi = s.split(":")
            return list(range(int(lo), int(hi) + 1))
        return [int(tok) for tok in s.split(",") if tok.strip()]
    except ValueError:
        raise click.UsageError(f"bad grid spec {spec_str!r}")


def _outdir(config: dict) -> Path:
    out = Path(config.get("out") or DEFAULT_OUT)
    out.mkdir(parents=True, exist_ok=True)
    return out


def run(config: dict) -> Path:
    """Dispatch a fully resolved configuration to its pipeline runner.

    Parameter problems (bad grids, violated hypotheses, budget overruns)
    surface as click usage errors, i.e. exit code 2.
    """
    kind = config.get("kind")
    if kind not in RUNNERS:
        raise click.UsageError(f"unknown experiment kind {kind!r}")
    try:
        return RUNNERS[kind](config)
    except (ValueError, MemoryError) as e:
        raise click.UsageError(f"{kind}: {e}")


# ---------------------------------------------------------------------------
# the command group


@click.group()
@click.option("--potential", type=str, default=None, help="Potential file (key = value format).")
@click.option("--seed", type=int, default=None, help="64-bit master seed.")
@click.option("--threads", type=int, default=None, help="Replicate-level worker count.")
@click.option("--out", type=str, default=None, help="Output directory.")
@click.option("--config", "config_path", type=str, default=None,
              help="JSON config or a previously written manifest.")
@click.version_option(__version__)
@click.pass_context
def main(ctx, potential, seed, threads, out, config_path):
    """Thermodynamic-formalism and shrinking-target covering experiments."""
    if potential is not None and not Path(potential).exists():
        raise click.UsageError(f"potential file not found: {potential}")
    ctx.obj = {
        "potential": potential,
        "seed": seed,
        "threads": threads,
        "out": out,
        "file_config": _load_config_file(config_path),
    }


@main.command()
@click.option("--q-min", type=float, default=None)
@click.option("--q-max", type=float, default=None)
@click.option("--q-points", type=int, default=None)
@click.option("--kappa", "kappas", type=float, multiple=True)
@click.option("--psi", type=str, default=None, help="Second potential for the pair exponent.")
@click.pass_context
def spectrum(ctx, q_min, q_max, q_points, kappas, psi):
    """Pressure curve, entropy spectrum and predicted covering dimensions."""
    flags = {"q_min": q_min, "q_max": q_max, "q_points": q_points}
    if kappas:
        flags["kappas"] = list(kappas)
    if psi is not None:
        flags["psi_text"] = _read_input_file(psi)
    config = _resolve(ctx, {"kind": "spectrum", "q_min": -8.0, "q_max": 8.0,
                            "q_points": 513, "kappas": [], "seed": 0, "threads": 1}, flags)
    run(config)


def run_spectrum(config: dict) -> Path:
    t0 = time.monotonic()
    out = _outdir(config)
    pot = _require_potential(config)
    psi = Potential.from_text(config["psi_text"]) if config.get("psi_text") else None
    if psi is not None and not psi.normalized:
        psi = normalize(psi)
    sp = Spectrum(pot)
    qs = np.linspace(config["q_min"], config["q_max"], config["q_points"])
    prof = sp.profile(qs)
    write_csv(out / "spectrum.csv", ["q", "P", "t", "E"],
              zip(prof.q_grid, prof.P_values, prof.t_values, prof.E_values))
    ext = prof.summary
    preds = []
    for kappa in config.get("kappas", []):
        p = predict_cover(pot, psi, kappa, spectrum=sp)
        preds.append({
            "kappa": p.kappa, "dim_F_pred": p.dim_escape, "dim_I_pred": p.dim_covered,
            "F_empty_pred": p.escape_empty, "kappa_phi_psi": p.kappa_pair,
            "kappa_F": p.kappa_cover_all, "endpoint_caveat": p.endpoint_caveat,
        })
    write_json(out / "spectrum_summary.json", {
        "e_minus": ext.t_min, "e_max": ext.t_peak, "e_plus": ext.t_max,
        "h_mu": ext.h_mu, "degenerate": ext.degenerate,
        "kappa_F": 1.0 / ext.t_max, "predictions": preds,
    })
    write_manifest(out, "spectrum", config, time.monotonic() - t0)
    return out


@main.command()
@click.option("--length", type=int, default=None)
@click.option("--n-max", type=int, default=None)
@click.option("--target", type=str, default=None,
              help="'self', 'word:<bits>', or 'psi' (needs --target-potential).")
@click.option("--target-potential", type=str, default=None)
@click.pass_context
def hit(ctx, length, n_max, target, target_potential):
    """Hitting times, exponent estimates and the neighbor-cylinder variant."""
    flags = {"length": length, "n_max": n_max, "target": target}
    if target_potential is not None:
        flags["psi_text"] = _read_input_file(target_potential)
    config = _resolve(ctx, {"kind": "hit", "length": 1 << 20, "n_max": 16,
                            "target": "self", "seed": 0, "threads": 1}, flags)
    run(config)


def run_hit(config: dict) -> Path:
    t0 = time.monotonic()
    out = _outdir(config)
    pot = _require_potential(config)
    chain = gibbs_chain(pot)
    n_max = int(config["n_max"])
    orbit = sample_orbit(chain, int(config["length"]), rng=stream(config["seed"], 0))
    target_spec = str(config["target"])
    if target_spec == "self":
        target = orbit.window(0, n_max)
    elif target_spec.startswith("word:"):
        target = Word.from_string(target_spec[5:])
        if target.n < n_max:
            raise click.UsageError("target word shorter than n-max")
    elif target_spec == "psi":
        if not config.get("psi_text"):
            raise click.UsageError("target 'psi' needs --target-potential")
        psi = Potential.from_text(config["psi_text"])
        if not psi.normalized:
            psi = normalize(psi)
        target = sample_orbit(gibbs_chain(psi), max(n_max, psi.memory),
                              rng=stream(config["seed"], 1)).window(0, n_max)
    else:
        raise click.UsageError(f"unknown target {target_spec!r}")
    star = star_hitting_times(orbit, target, n_max)
    prof = star.center
    rows = []
    star_tau = star.tau
    for n in range(1, n_max + 1):
        prefix = target.prefix(n)
        ent = -np.log2(cylinder_measure(chain, prefix)) / n
        tau_n = prof.tau[n - 1]
        alpha_n = np.log2(tau_n) / n if tau_n != NOT_FOUND else float("nan")
        ts = star_tau[n - 1]
        rows.append((n, tau_n, alpha_n, ts, ent))
    write_csv(out / "hit.csv", ["n", "tau_n", "alpha_n", "tau_star_n", "local_entropy_n"], rows)
    write_json(out / "hit_summary.json", {
        "target": str(target), "alpha": prof.alpha(), "alpha_star": star.alpha(),
        "horizon": prof.horizon, "length": orbit.length,
    })
    write_manifest(out, "hit", config, time.monotonic() - t0)
    return out


@main.command()
@click.option("--kappa", type=float, default=None)
@click.option("--length", type=int, default=None)
@click.option("--n-grid", type=str, default=None, help="'12:18' or '12,14,16'.")
@click.option("--slack", type=float, default=None)
@click.pass_context
def cover(ctx, kappa, length, n_grid, slack):
    """Hit/unhit censuses and dimension slope estimates at radius n**-kappa."""
    config = _resolve(ctx, {"kind": "cover", "kappa": 2.0, "length": 1 << 22,
                            "n_grid": "8:14", "slack": 0.05, "seed": 0, "threads": 1},
                      {"kappa": kappa, "length": length, "n_grid": n_grid, "slack": slack})
    run(config)


def run_cover(config: dict) -> Path:
    t0 = time.monotonic()
    out = _outdir(config)
    pot = _require_potential(config)
    chain = gibbs_chain(pot)
    grid = _parse_grid(config["n_grid"])
    orbit = sample_orbit(chain, int(config["length"]), rng=stream(config["seed"], 0))
    pred = predict_cover(pot, None, config["kappa"])
    est = estimate_dims(orbit, config["kappa"], grid, slack=config["slack"], prediction=pred)
    rows = []
    for i, n in enumerate(est.n_grid):
        rows.append((n, est.K_covered[i], est.D[i], est.U[i],
                     est.dim_covered_est[i], est.dim_escape_est[i],
                     pred.dim_covered, pred.dim_escape))
    write_csv(out / "cover.csv",
              ["n", "K_n", "D_n", "U_n", "dim_I_est", "dim_F_est", "dim_I_pred", "dim_F_pred"],
              rows)
    write_json(out / "cover_summary.json", {
        "kappa": est.kappa, "slack": est.slack,
        "slope_I": est.slope_covered, "slope_I_se": est.slope_covered_se,
        "slope_F": est.slope_escape, "slope_F_se": est.slope_escape_se,
        "dim_I_pred": pred.dim_covered, "dim_F_pred": pred.dim_escape,
        "F_empty_pred": pred.escape_empty,
        "saturated": [bool(x) for x in est.saturated],
    })
    write_manifest(out, "cover", config, time.monotonic() - t0)
    return out


@main.command()
@click.option("-n", "n_len", type=int, default=None)
@click.option("--window-count", type=int, default=None)
@click.option("--bin-width", type=float, default=None)
@click.option("--length", type=int, default=None)
@click.pass_context
def census(ctx, n_len, window_count, bin_width, length):
    """Distinct-subword census binned by local entropy, against predictions."""
    config = _resolve(ctx, {"kind": "census", "n": 10, "window_count": 1 << 18,
                            "bin_width": 0.05, "length": None, "seed": 0, "threads": 1},
                      {"n": n_len, "window_count": window_count,
                       "bin_width": bin_width, "length": length})
    run(config)


def run_census(config: dict) -> Path:
    t0 = time.monotonic()
    out = _outdir(config)
    pot = _require_potential(config)
    chain = gibbs_chain(pot)
    n = int(config["n"])
    L = int(config["window_count"])
    length = int(config["length"]) if config.get("length") else L + n
    orbit = sample_orbit(chain, length, rng=stream(config["seed"], 0))
    report = subword_census(orbit, chain, n, L, config["bin_width"], spectrum=Spectrum(pot))
    write_csv(out / "census.csv",
              ["beta_bin", "count", "log2_count_over_n", "predicted"],
              [(b.beta_center, b.count, b.log2_count_over_n, b.predicted) for b in report.bins])
    write_json(out / "census_summary.json", {
        "n": report.n, "window_count": report.L, "bin_width": report.bin_width,
        "total_distinct": report.total_distinct,
    })
    write_manifest(out, "census", config, time.monotonic() - t0)
    return out


@main.command()
@click.option("--ladder", type=str, default=None, help="Comma-separated rung lengths.")
@click.option("--epsilon", type=float, default=None)
@click.option("-c", "c_rate", type=float, default=None)
@click.option("--prefix", type=str, default=None)
@click.option("--n0", type=int, default=None, help="Minimum level offset above each rung.")
@click.pass_context
def tree(ctx, ladder, epsilon, c_rate, prefix, n0):
    """Good-cylinder tree counts and the Cantor-set dimension lower bound."""
    config = _resolve(ctx, {"kind": "tree", "ladder": "12,32", "epsilon": 0.1, "c": 0.55,
                            "prefix": "", "n0": 8, "seed": 0, "threads": 1},
                      {"ladder": ladder, "epsilon": epsilon, "c": c_rate,
                       "prefix": prefix, "n0": n0})
    run(config)


def run_tree(config: dict) -> Path:
    t0 = time.monotonic()
    out = _outdir(config)
    pot = _require_potential(config)
    chain = gibbs_chain(pot)
    ladder = _parse_grid(config["ladder"])
    c = float(config["c"])
    eps = float(config["epsilon"])
    n0 = int(config["n0"])
    length = int(np.floor(2.0 ** (c * max(ladder)))) + max(ladder) + 1
    orbit = sample_orbit(chain, length, rng=stream(config["seed"], 0))
    prefix = Word.from_string(config["prefix"]) if config.get("prefix") else Word(())
    tc = tree_counts(orbit, chain, prefix, max(ladder), eps, c, n0)
    cantor = cantor_lower_bound(orbit, chain, ladder, eps, c, n0)
    write_json(out / "tree.json", {
        "ladder": list(cantor.ladder), "epsilon": eps, "c": c, "n0": n0,
        "prefix": str(prefix),
        "tree_levels": tc.levels, "tree_counts": tc.counts,
        "tree_bound": tc.bound, "tree_meets_bound": tc.meets_bound(),
        "cantor_levels": cantor.levels, "cantor_counts": cantor.counts,
        "cantor_failed_level": cantor.failed_level,
        "cantor_dimension_lower_bound": cantor.dimension_lower_bound,
    })
    write_manifest(out, "tree", config, time.monotonic() - t0)
    return out


@main.command("sft")
@click.option("--sft", "sft_path", type=str, default=None, help="Forbidden-word file.")
@click.option("--q-min", type=float, default=None)
@click.option("--q-max", type=float, default=None)
@click.option("--q-points", type=int, default=None)
@click.option("--kappa", "kappas", type=float, multiple=True)
@click.pass_context
def sft_cmd(ctx, sft_path, q_min, q_max, q_points, kappas):
    """Restricted pressure, spectrum and emptiness predictions on a subshift."""
    flags = {"q_min": q_min, "q_max": q_max, "q_points": q_points}
    if sft_path is not None:
        flags["sft_text"] = _read_input_file(sft_path)
    if kappas:
        flags["kappas"] = list(kappas)
    config = _resolve(ctx, {"kind": "sft", "q_min": -8.0, "q_max": 8.0, "q_points": 257,
                            "kappas": [], "seed": 0, "threads": 1}, flags)
    run(config)


def run_sft(config: dict) -> Path:
    t0 = time.monotonic()
    out = _outdir(config)
    pot = _require_potential(config)
    if not config.get("sft_text"):
        raise click.UsageError("an SFT file is required (--sft)")
    try:
        spec = SftSpec.from_text(config["sft_text"])
    except ValueError as e:
        raise click.UsageError(f"bad SFT file: {e}")
    system = SftSystem(spec, pot)
    qs = np.linspace(config["q_min"], config["q_max"], config["q_points"])
    prof = system.spectrum.profile(qs)
    write_csv(out / "sft.csv", ["q", "P_A", "t_A", "E_A"],
              zip(prof.q_grid, prof.P_values, prof.t_values, prof.E_values))
    s = system.summary
    preds = []
    for kappa in config.get("kappas", []):
        p = sft_predict(spec, pot, kappa, system=system)
        preds.append({
            "kappa": p.kappa, "dim_F_A_pred": p.dim_escape, "dim_I_A_pred": p.dim_covered,
            "F_A_empty_pred": p.escape_empty, "I_A_empty_pred": p.covered_empty,
            "boundary_flag": p.boundary_flag,
        })
    write_json(out / "sft_summary.json", {
        "forbidden": [str(w) for w in spec.forbidden],
        "P_A": s.P_A, "dim_Sigma_A": s.dim,
        "e_A_minus": s.t_min, "e_A_max": s.t_peak, "e_A_plus": s.t_max,
        "h_A": s.h_restricted, "degenerate": s.degenerate,
        "I_A_empty_below": -s.P_A, "F_A_empty_above": s.t_max,
        "predictions": preds,
    })
    write_manifest(out, "sft", config, time.monotonic() - t0)
    return out


@main.command()
@click.option("--kappa", type=float, default=None)
@click.option("--depth", type=int, default=None)
@click.option("--n-start", type=int, default=None)
@click.option("--n-stop", type=int, default=None)
@click.option("--point", type=float, default=None, help="Fixed start point instead of an orbit.")
@click.option("--length", type=int, default=None)
@click.pass_context
def circle(ctx, kappa, depth, n_start, n_stop, point, length):
    """Uncovered dyadic cells for the shrinking intervals around an orbit."""
    config = _resolve(ctx, {"kind": "circle", "kappa": 0.7, "depth": 12, "n_start": 4,
                            "n_stop": 1 << 14, "point": None, "length": None,
                            "seed": 0, "threads": 1},
                      {"kappa": kappa, "depth": depth, "n_start": n_start,
                       "n_stop": n_stop, "point": point, "length": length})
    run(config)


def run_circle(config: dict) -> Path:
    t0 = time.monotonic()
    out = _outdir(config)
    if config.get("point") is not None:
        source = CirclePoint(config["point"])
    else:
        pot = _require_potential(config)
        chain = gibbs_chain(pot)
        length = int(config["length"]) if config.get("length") else int(config["n_stop"]) + 64
        source = sample_orbit(chain, length, rng=stream(config["seed"], 0))
    report = circle_cover_report(source, config["kappa"], int(config["depth"]),
                                 int(config["n_start"]), int(config["n_stop"]))
    write_json(out / "circle.json", {
        "kappa": report.kappa, "depth": report.depth,
        "n_start": report.n_start, "n_stop": report.n_stop,
        "covered_cells": report.covered_cells, "uncovered_cells": report.uncovered_cells,
        "uncovered": report.uncovered, "truncated": report.truncated,
    })
    write_manifest(out, "circle", config, time.monotonic() - t0)
    return out


@main.command()
@click.option("--kind", "decay_kind", type=click.Choice(["late-hit", "multi-early-hit", "tree-failure"]),
              default=None)
@click.option("--n-grid", type=str, default=None)
@click.option("--replicates", "-R", type=int, default=None)
@click.option("--gamma", type=float, default=None)
@click.option("-a", "a_rate", type=float, default=None)
@click.option("-b", "b_rate", type=float, default=None)
@click.option("-c", "c_rate", type=float, default=None)
@click.option("--epsilon", type=float, default=None)
@click.pass_context
def decay(ctx, decay_kind, n_grid, replicates, gamma, a_rate, b_rate, c_rate, epsilon):
    """Monte Carlo decay of rare hitting events across replicated orbits."""
    config = _resolve(ctx, {"kind": "decay", "decay_kind": "late-hit", "n_grid": "6:12",
                            "replicates": 100, "gamma": 0.3, "a": 0.5, "b": 0.4, "c": 0.35,
                            "epsilon": 0.1, "seed": 0, "threads": 1},
                      {"decay_kind": decay_kind, "n_grid": n_grid, "replicates": replicates,
                       "gamma": gamma, "a": a_rate, "b": b_rate, "c": c_rate,
                       "epsilon": epsilon})
    run(config)


def run_decay(config: dict) -> Path:
    t0 = time.monotonic()
    out = _outdir(config)
    pot = _require_potential(config)
    chain = gibbs_chain(pot)
    grid = _parse_grid(config["n_grid"])
    kind = config["decay_kind"]
    kwargs = dict(seed=int(config["seed"]), replicates=int(config["replicates"]),
                  threads=int(config.get("threads") or 1))
    if kind == "late-hit":
        report = late_hit_experiment(chain, grid, float(config["gamma"]), **kwargs)
    elif kind == "multi-early-hit":
        report = multi_early_hit_experiment(
            chain, grid, float(config["a"]), float(config["b"]), float(config["c"]),
            float(config["gamma"]), **kwargs)
    elif kind == "tree-failure":
        report = tree_failure_experiment(
            chain, grid, float(config["epsilon"]), float(config["c"]), **kwargs)
    else:
        raise click.UsageError(f"unknown decay kind {kind!r}")
    rows = zip(report.n_grid, report.counts, report.frequencies,
               report.wilson_low, report.wilson_high)
    write_csv(out / "decay.csv", ["n", "count", "freq", "wilson_low", "wilson_high"], rows)
    write_json(out / "decay_summary.json", {
        "kind": report.kind, "replicates": report.replicates,
        "slope": report.slope, "params": report.params,
    })
    write_manifest(out, "decay", config, time.monotonic() - t0)
    return out


@main.command()
@click.pass_context
def selftest(ctx):
    """Fast internal consistency battery; exit code 1 on any failure."""
    failures = []

    def check(name, ok):
        line = f"[selftest] {'PASS' if ok else 'FAIL'} {name}"
        click.echo(line)
        if not ok:
            failures.append(name)

    bern = Potential.bernoulli(0.25)
    check("pressure closed form",
          abs(pressure(bern, 2.0) - np.log2(0.25**2 + 0.75**2)) < 1e-10)
    chain = gibbs_chain(bern)
    S = chain.n_states
    P = np.zeros((S, S))
    for u in range(S):
        for b in (0, 1):
            P[u, chain.graph.nxt[u, b]] += chain.p[u, b]
    check("stationarity", np.allclose(chain.pi @ P, chain.pi, atol=1e-12))
    lvl = np.exp2(log2_measures_of_codes(chain, np.arange(1 << 6), 6))
    check("level sum", abs(lvl.sum() - 1.0) < 1e-10)
    orbit = sample_orbit(chain, 1 << 12, rng=stream(123, 0))
    target = orbit.window(37, 10)
    prof = hitting_times(orbit, target, 10)
    check("hitting vs naive", np.array_equal(prof.tau, _naive_tau(orbit.to_bits(), target.to_array())))
    w = Word.from_string("0101")
    pred, succ = neighbor_cylinders(w)
    check("neighbor bijection", neighbor_cylinders(succ)[0] == w and neighbor_cylinders(pred)[1] == w)
    if failures:
        click.echo(f"[selftest] {len(failures)} failure(s)")
        sys.exit(1)
    click.echo("[selftest] all checks passed")


def _naive_tau(bits: np.ndarray, target: np.ndarray) -> np.ndarray:
    n_max = len(target)
    tau = np.full(n_max, NOT_FOUND, dtype=np.int64)
    for n in range(1, n_max + 1):
        for l in range(1, len(bits) - n_max + 1):
            if np.array_equal(bits[l : l + n], target[:n]):
                tau[n - 1] = l
                break
    return tau


RUNNERS = {
    "spectrum": run_spectrum,
    "hit": run_hit,
    "cover": run_cover,
    "census": run_census,
    "tree": run_tree,
    "sft": run_sft,
    "circle": run_circle,
    "decay": run_decay,
}


if __name__ == "__main__":
    main()
