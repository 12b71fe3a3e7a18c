"""Batch experiment runner.

Every subcommand reads a JSON config, validates it against its own
preconditions, runs, writes CSV/JSON artifacts into the output directory
and prints a short summary.  Exit codes: 0 success, 1 solver or
consistency failure (``diagnostics.json`` is written), 2 config error (no
artifacts).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .capacity import (DEFAULT_THRESHOLD, Condenser, capacity, capacity_sequence, classify,
                       classify_ends, end_potential, multi_end_harmonic)
from .energy import SolverConfig
from .errors import ConfigError, DomainError, GraphpotError, SolverError
from .families import FamilySpec, encode, generate, glue_swap
from .graph import Truncation, ball, end_decomposition, volume
from .inequalities import (SchrodingerSpec, check_lambda_volume_lower, lambda_ball_upper,
                           schrodinger_bottom, sobolev_glue_check, sobolev_search, sobolev_trend,
                           volume_growth_check, volume_growth_constants)
from .reports import Artifacts

log = logging.getLogger("graphpot")

SUBCOMMANDS = ("generate", "capacity", "classify-end", "end-potential", "multi-harmonic",
               "sobolev", "lambda", "glue-check", "volume-check", "schrodinger-bottom",
               "corroborate")

_KNOWN_KEYS = {"family", "p", "q", "levels", "K", "seeds", "output_dir", "thresholds", "level",
               "end", "x0", "radii", "core", "collar_width", "trials", "restarts", "H",
               "potential"}


@dataclass
class ExperimentConfig:
    family: FamilySpec
    p: float = 2.0
    q: float | None = None
    levels: list[int] = field(default_factory=lambda: [4, 8, 16])
    K: Any = "origin"
    seeds: list[int] = field(default_factory=lambda: [0])
    output_dir: str = "out"
    classify_threshold: float = DEFAULT_THRESHOLD
    grad_tol: float = 1e-10
    max_iter: int = 10000
    hessian_floor: float = 1e-12
    tol: float = 1e-9
    options: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(d) - _KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "family" not in d:
            raise ConfigError("config needs a 'family'")
        family = FamilySpec.from_dict(d["family"])
        th = d.get("thresholds", {})
        if not isinstance(th, dict):
            raise ConfigError("'thresholds' must be an object")
        try:
            cfg = cls(
                family=family,
                p=float(d.get("p", 2.0)),
                q=None if d.get("q") is None else float(d["q"]),
                levels=[_int(L, "levels") for L in d.get("levels", [4, 8, 16])],
                K=d.get("K", "origin"),
                seeds=[_int(s, "seeds") for s in d.get("seeds", [0])],
                output_dir=str(d.get("output_dir", "out")),
                classify_threshold=float(th.get("classify_threshold", DEFAULT_THRESHOLD)),
                grad_tol=float(th.get("grad_tol", 1e-10)),
                max_iter=_int(th.get("max_iter", 10000), "max_iter"),
                hessian_floor=float(th.get("hessian_floor", 1e-12)),
                tol=float(th.get("tol", 1e-9)),
                options={k: d[k] for k in d if k not in
                         {"family", "p", "q", "levels", "K", "seeds", "output_dir", "thresholds"}},
                raw=d,
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad config value: {exc}") from None
        cfg.validate_common()
        return cfg

    def validate_common(self) -> None:
        if not self.p >= 2:
            raise ConfigError(f"p must be >= 2, got {self.p}")
        if not self.levels or any(L < 1 for L in self.levels):
            raise ConfigError("levels must be a nonempty list of integers >= 1")
        if len(set(self.levels)) != len(self.levels):
            raise ConfigError("levels must be distinct")
        if not self.seeds or any(s < 0 for s in self.seeds):
            raise ConfigError("seeds must be a nonempty list of naturals")
        if not self.classify_threshold > 0:
            raise ConfigError("classify_threshold must be positive")
        self.solver()

    def solver(self, trace: bool = False) -> SolverConfig:
        return SolverConfig(p=self.p, grad_tol=self.grad_tol, max_iter=self.max_iter,
                            hessian_floor=self.hessian_floor, trace=trace)

    @property
    def sorted_levels(self) -> list[int]:
        return sorted(self.levels)

    @property
    def deepest(self) -> int:
        return int(self.options.get("level", max(self.levels)))

    def need_q(self) -> float:
        if self.q is None or not self.q > self.p:
            raise ConfigError("this subcommand needs q > p")
        return self.q

    def need_levels(self, n: int) -> None:
        if len(self.levels) < n:
            raise ConfigError(f"this subcommand needs at least {n} levels")


def _int(v, name: str) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise ConfigError(f"{name} entries must be integers, got {v!r}")
    return int(v)


def resolve_set(spec, t: Truncation, name: str = "K") -> frozenset:
    """Vertex set from ``"origin"``, ``"hub"``, a list of ids or coordinates,
    ``{"ball": r}`` around the origin or ``{"ring": x}`` on a cylinder."""
    if spec == "origin":
        S = frozenset([t.origin])
    elif spec == "hub":
        if "hub" not in t.meta:
            raise ConfigError(f"{name} = 'hub' needs a glued family")
        S = frozenset(t.meta["hub"])
    elif isinstance(spec, list):
        S = frozenset(encode(x) if isinstance(x, list) else _int(x, name) for x in spec)
    elif isinstance(spec, dict) and set(spec) == {"ball"}:
        try:
            S = ball(t, t.origin, float(spec["ball"]))
        except DomainError as exc:
            raise ConfigError(f"{name}: {exc}") from None
    elif isinstance(spec, dict) and set(spec) == {"ring"}:
        if "circumference" not in t.meta:
            raise ConfigError(f"{name} = ring needs a cylinder")
        x = _int(spec["ring"], name)
        S = frozenset(encode((x, j)) for j in range(t.meta["circumference"]))
    else:
        raise ConfigError(f"cannot interpret {name} = {spec!r}")
    missing = [x for x in S if x not in t.graph]
    if not S or missing:
        raise ConfigError(f"{name} has vertices outside the truncation: {sorted(missing)[:5]}")
    if S & t.horizon:
        raise ConfigError(f"{name} meets the horizon at level {t.level}")
    return S


def _vertex(v, t: Truncation, name: str) -> int:
    x = encode(v) if isinstance(v, list) else _int(v, name)
    if x not in t.graph:
        raise ConfigError(f"{name} = {v!r} is not a vertex")
    return x


# -- subcommands ------------------------------------------------------------------

def _shallow(cfg: ExperimentConfig) -> Truncation:
    return generate(cfg.family, min(cfg.levels))


def cmd_generate(cfg: ExperimentConfig, art: Artifacts, verbose: bool):
    t = generate(cfg.family, cfg.deepest)
    g = t.graph
    art.csv("vertices.csv", ({"vertex": x, "mu": g.mu[x], "horizon": x in t.horizon}
                             for x in g.vertices.tolist()), ["vertex", "mu", "horizon"])
    art.csv("edges.csv", ({"u": u, "v": v, "w": w, "ell": ell} for u, v, w, ell in g.edge_rows()),
            ["u", "v", "w", "ell"])
    summary = {"level": t.level, "vertices": len(g), "edges": len(g.edge_keys),
               "horizon": len(t.horizon), "volume": volume(g, g.mu)}
    art.json("summary.json", summary)
    return [f"level {t.level}: {len(g)} vertices, {len(g.edge_keys)} edges, "
            f"{len(t.horizon)} on the horizon"]


def _export_potential(art: Artifacts, h, verbose: bool, extra: dict | None = None):
    cols = ["vertex", "value"] + (["limit"] if extra else [])
    art.csv("potential.csv", ({"vertex": x, "value": h[x], **({"limit": extra[x]} if extra and
                                                               x in extra else {})}
                              for x in sorted(h.values)), cols)
    if verbose:
        art.csv("trace.csv", ({"iteration": i, "energy": e, "residual": r} for i, e, r in h.trace),
                ["iteration", "energy", "residual"])


def cmd_capacity(cfg: ExperimentConfig, art: Artifacts, verbose: bool):
    K = resolve_set(cfg.K, _shallow(cfg))
    seq = capacity_sequence(cfg.family, K, cfg.p, cfg.levels, cfg=cfg.solver())
    art.csv("capacity.csv", seq.rows(), ["level", "capacity"])
    _, h = capacity(Condenser(K, generate(cfg.family, max(cfg.levels))), cfg=cfg.solver(verbose))
    _export_potential(art, h, verbose)
    payload = {"sequence": seq.to_dict()}
    lines = [f"level {r['level']:>6}  capacity {r['capacity']:.10g}" for r in seq.rows()]
    if len(seq.levels) >= 3:
        c = classify(seq, cfg.classify_threshold)
        payload["classification"] = c.to_dict()
        lines.append(f"verdict: {c.verdict} (fitted limit {seq.fitted_limit:.4g})")
    art.json("summary.json", payload)
    return lines


def cmd_classify_end(cfg: ExperimentConfig, art: Artifacts, verbose: bool):
    cfg.need_levels(3)
    K = resolve_set(cfg.K, _shallow(cfg))
    verdicts = classify_ends(cfg.family, K, cfg.p, cfg.levels, cfg.classify_threshold,
                             cfg.solver())
    rows, lines = [], []
    for v in verdicts:
        for L, a, b in zip(v.end.evidence.levels, v.end.evidence.values,
                           v.double.evidence.values):
            rows.append({"end": v.label, "level": L, "capacity": a, "double_capacity": b})
        lines.append(f"end {v.label}: {v.end.verdict} (limit {v.end.evidence.fitted_limit:.4g}); "
                     f"double: {v.double.verdict} (limit {v.double.evidence.fitted_limit:.4g})")
    art.csv("ends.csv", rows, ["end", "level", "capacity", "double_capacity"])
    art.json("summary.json", {"ends": [{"label": v.label, "end": v.end.to_dict(),
                                        "double": v.double.to_dict()} for v in verdicts]})
    return lines or ["no ends"]


def cmd_end_potential(cfg: ExperimentConfig, art: Artifacts, verbose: bool):
    K = resolve_set(cfg.K, _shallow(cfg))
    label = cfg.options.get("end")
    labels = [e.label for e in end_decomposition(_shallow(cfg), K)]
    if label is not None and label not in labels:
        raise ConfigError(f"end {label} not among {labels}")
    res = end_potential(cfg.family, K, cfg.p, cfg.levels, label, cfg.solver(verbose))
    art.csv("end_potential.csv", res.rows(), ["level", "min_value", "energy"])
    _export_potential(art, res.potential, verbose, res.limit)
    art.json("summary.json", {"end": res.label, "levels": res.levels,
                              "min_values": res.min_values, "energies": res.energies,
                              "monotone_violation": res.monotone_violation})
    return [f"end {res.label}"] + [f"level {r['level']:>6}  min h {r['min_value']:.6g}  "
                                   f"energy {r['energy']:.6g}" for r in res.rows()]


def _k_or_default(cfg: ExperimentConfig):
    return None if "K" not in cfg.raw else resolve_set(cfg.K, _shallow(cfg))


def cmd_multi_harmonic(cfg: ExperimentConfig, art: Artifacts, verbose: bool):
    cfg.need_levels(3)
    res = multi_end_harmonic(cfg.family, cfg.p, cfg.levels, _k_or_default(cfg),
                             cfg.classify_threshold, cfg.solver(verbose))
    art.csv("multi_harmonic.csv", res.rows(),
            ["level", "energy", "bound_energy", "lower_gap", "upper_gap"])
    _export_potential(art, res.potential, verbose)
    summary = {"ends": list(res.end_labels), "verdicts": res.verdicts,
               "oscillation": res.oscillation, "u_min": res.u_min, "u_max": res.u_max,
               "ok": res.ok(cfg.tol)}
    art.json("summary.json", summary)
    return [f"ends {res.end_labels}: oscillation {res.oscillation:.6g}, "
            f"u in [{res.u_min:.3g}, {res.u_max:.3g}], checks {'pass' if res.ok(cfg.tol) else 'FAIL'}"]


def _restarts(cfg: ExperimentConfig) -> int:
    r = _int(cfg.options.get("restarts", 4), "restarts")
    if r < 0:
        raise ConfigError("restarts must be >= 0")
    return r


def cmd_sobolev(cfg: ExperimentConfig, art: Artifacts, verbose: bool):
    q = cfg.need_q()
    rows = []
    for seed in cfg.seeds:
        for L, est in zip(cfg.sorted_levels,
                          sobolev_trend(cfg.family, cfg.levels, cfg.p, q, _restarts(cfg), seed)):
            rows.append({"seed": seed, "level": L, "upper_bound": est.value,
                         "best_kind": est.best_kind})
    art.csv("sobolev.csv", rows, ["seed", "level", "upper_bound", "best_kind"])
    art.json("summary.json", {"p": cfg.p, "q": q, "rows": rows})
    return [f"seed {r['seed']} level {r['level']:>4}  S <= {r['upper_bound']:.6g}" for r in rows]


def _sobolev_here(t: Truncation, cfg: ExperimentConfig, q: float) -> float:
    return sobolev_search(t, cfg.p, q, _restarts(cfg), cfg.seeds[0]).value


def _radii(cfg: ExperimentConfig, default) -> list[float]:
    radii = cfg.options.get("radii", default)
    if not isinstance(radii, list) or not radii or any(not float(r) > 0 for r in radii):
        raise ConfigError("radii must be a nonempty list of positive numbers")
    return [float(r) for r in radii]


def cmd_lambda(cfg: ExperimentConfig, art: Artifacts, verbose: bool):
    q = cfg.need_q()
    t = generate(cfg.family, cfg.deepest)
    x0 = _vertex(cfg.options.get("x0", t.origin), t, "x0")
    radii = _radii(cfg, [2, 3, 4])
    balls = [ball(t, x0, R) for R in radii]
    S = _sobolev_here(t, cfg, q)
    rows = []
    for R, B in zip(radii, balls):
        rep = lambda_ball_upper(t, x0, R, cfg.p, cfg.tol)
        low = check_lambda_volume_lower(t, B - t.horizon, cfg.p, q, S, cfg.tol)
        rows.append({"R": R, "lambda": rep.lam, "test_quotient": rep.test_quotient,
                     "volume_quotient": rep.volume_quotient,
                     "half_ball_quotient": rep.half_ball_quotient, "upper_bound": rep.bound,
                     "upper_pass": rep.ok, "gradient_step_holds": rep.gradient_step_holds,
                     "lower_lhs": low.lhs, "S_p": low.rhs, "lower_pass": low.ok})
    cols = list(rows[0])
    art.csv("lambda.csv", rows, cols)
    ok = all(r["upper_pass"] and r["lower_pass"] for r in rows)
    art.json("summary.json", {"S_upper": S, "x0": x0, "ok": ok})
    return [f"R {r['R']:g}: lambda {r['lambda']:.6g} <= {r['upper_bound']:.6g} "
            f"[{'pass' if r['upper_pass'] else 'FAIL'}], vol^((q-p)/q) lambda {r['lower_lhs']:.6g}"
            f" >= S^p {r['S_p']:.6g} [{'pass' if r['lower_pass'] else 'FAIL'}]" for r in rows]


def cmd_volume_check(cfg: ExperimentConfig, art: Artifacts, verbose: bool):
    q = cfg.need_q()
    t = generate(cfg.family, cfg.deepest)
    x0 = _vertex(cfg.options.get("x0", t.origin), t, "x0")
    radii = _radii(cfg, [1, 2, 3, 4])
    for R in radii:
        ball(t, x0, R)
    S = _sobolev_here(t, cfg, q)
    consts = volume_growth_constants(cfg.p, q, S)
    rep = volume_growth_check(t, x0, radii, consts)
    art.csv("volume.csv", rep.rows, ["R", "volume", "bound", "cutoff_bound", "pass"])
    art.json("summary.json", {"constants": vars(consts), "ok": rep.ok})
    return [f"alpha {consts.alpha:.6g}, alpha_bar {consts.alpha_bar:.6g}, C1 {consts.C1:.6g}, "
            f"C2 {consts.C2:.6g}"] + [
        f"R {r['R']:g}: vol {r['volume']:.6g} >= {r['bound']:.6g} "
        f"[{'pass' if r['pass'] else 'FAIL'}]" for r in rep.rows]


def cmd_glue_check(cfg: ExperimentConfig, art: Artifacts, verbose: bool):
    q = cfg.need_q()
    t = generate(cfg.family, cfg.deepest)
    core = resolve_set(cfg.options.get("core", {"ball": 2}), t, "core")
    width = _int(cfg.options.get("collar_width", 2), "collar_width")
    trials = _int(cfg.options.get("trials", 1000), "trials")
    if width < 1 or trials < 0:
        raise ConfigError("collar_width must be >= 1 and trials >= 0")
    rep = sobolev_glue_check(t, core, width, trials, cfg.p, q, cfg.seeds[0], _restarts(cfg),
                             cfg.tol)
    art.csv("glue.csv", rep.rows, ["trial", "kind", "ratio"])
    summary = {k: getattr(rep, k) for k in ("S_inner", "S_outer", "grad_rho", "degree_factor",
                                           "C1", "max_ratio", "capacity", "vacuous", "message")}
    summary["ok"] = rep.ok
    art.json("summary.json", summary)
    return [f"C1 {rep.C1:.6g}, max ratio {rep.max_ratio:.6g}, cap_p(collared core) "
            f"{rep.capacity:.6g} [{'pass' if rep.ok else 'FAIL'}]"]


def _schrodinger(cfg: ExperimentConfig) -> SchrodingerSpec:
    pot = cfg.options.get("potential", 0.0)
    if isinstance(pot, dict):
        pot = {_int(int(k), "potential"): float(v) for k, v in pot.items()}
    elif isinstance(pot, (int, float)) and not isinstance(pot, bool):
        pot = float(pot)
    else:
        raise ConfigError("potential must be a number or an object vertex -> value")
    return SchrodingerSpec(pot, float(cfg.options.get("H", 1.0)))


def cmd_schrodinger_bottom(cfg: ExperimentConfig, art: Artifacts, verbose: bool):
    spec = _schrodinger(cfg)
    rows = [{"level": L, "bottom": schrodinger_bottom(generate(cfg.family, L), spec)}
            for L in cfg.sorted_levels]
    gate = spec.H > spec.critical_H(cfg.p)
    art.csv("schrodinger.csv", rows, ["level", "bottom"])
    art.json("summary.json", {"H": spec.H, "critical_H": spec.critical_H(cfg.p),
                              "hypothesis_holds": gate, "rows": rows})
    return [f"level {r['level']:>4}  bottom {r['bottom']:.10g}" for r in rows] + [
        f"H = {spec.H} {'>' if gate else '<='} p^2/(4(p-1)) = {spec.critical_H(cfg.p):.6g}"]


def cmd_corroborate(cfg: ExperimentConfig, art: Artifacts, verbose: bool):
    q = cfg.need_q()
    cfg.need_levels(3)
    first = _shallow(cfg)
    K = _k_or_default(cfg)
    K = K if K is not None else (frozenset(first.meta["hub"]) if "hub" in first.meta
                                 else frozenset([first.origin]))
    ends = end_decomposition(first, K)
    if len(ends) < 2:
        raise ConfigError(f"corroborate needs a family with two ends, found {len(ends)}")
    verdicts = classify_ends(cfg.family, K, cfg.p, cfg.levels, cfg.classify_threshold,
                             cfg.solver())
    trend = sobolev_trend(cfg.family, cfg.levels, cfg.p, q, _restarts(cfg), cfg.seeds[0])
    res = multi_end_harmonic(cfg.family, cfg.p, cfg.levels, K, cfg.classify_threshold,
                             cfg.solver(verbose))
    finite_energy = math.isfinite(res.energies[-1]) and res.energies[-1] <= max(
        res.bound_energies) + cfg.tol
    nonconstant = res.oscillation > cfg.tol
    swap_err = None
    if "hub" in first.meta and len(cfg.family.ends) == 2 and cfg.family.ends[0] == cfg.family.ends[1]:
        m = glue_swap(generate(cfg.family, max(cfg.levels)))
        u = res.potential
        swap_err = max(abs(u[m[x]] - (1.0 - u[x])) for x in u.values)
    rows = []
    for i, L in enumerate(cfg.sorted_levels):
        row = {"level": L, "sobolev_upper": trend[i].value, "u_energy": res.energies[i],
               "bound_energy": res.bound_energies[i]}
        for j, v in enumerate(verdicts[:2]):
            row[f"end{j + 1}_capacity"] = v.end.evidence.values[i]
        rows.append(row)
    art.csv("corroborate.csv", rows, ["level", "end1_capacity", "end2_capacity", "sobolev_upper",
                                      "u_energy", "bound_energy"])
    _export_potential(art, res.potential, verbose)
    s_vals = [e.value for e in trend]
    persistent = s_vals[-1] >= 0.5 * s_vals[0] > 0
    spectral = None
    if "H" in cfg.options:
        spec = _schrodinger(cfg)
        bottom = schrodinger_bottom(generate(cfg.family, max(cfg.levels)), spec)
        spectral = {"H": spec.H, "H_above_critical": spec.H > spec.critical_H(cfg.p),
                    "bottom": bottom, "bottom_nonnegative": bottom >= -cfg.tol}
    if persistent:
        note = ("the Sobolev upper bound persists across levels; since two hyperbolic ends "
                "carry a non-constant bounded p-harmonic function of finite energy, the "
                "one-end conclusion forces the spectral hypothesis to fail on this family")
    else:
        note = ("the Sobolev upper bound decays across levels, so the one-end conclusion "
                "places no constraint on this two-ended family")
    summary = {"verdicts": {v.label: v.end.verdict for v in verdicts},
               "double_verdicts": {v.label: v.double.verdict for v in verdicts},
               "u_oscillation": res.oscillation, "u_nonconstant": nonconstant,
               "u_finite_energy": finite_energy, "u_energy": res.energies[-1],
               "u_checks_pass": res.ok(cfg.tol), "swap_antisymmetry_error": swap_err,
               "sobolev_trend": s_vals, "sobolev_persistent": persistent,
               "spectral": spectral, "note": note}
    art.json("report.json", summary)
    lines = [f"end {v.label}: {v.end.verdict}" for v in verdicts]
    lines.append(f"u: oscillation {res.oscillation:.6g}, energy {res.energies[-1]:.6g} "
                 f"({'finite' if finite_energy else 'unbounded'}), "
                 f"{'non-constant' if nonconstant else 'constant'}")
    lines.append("Sobolev upper bounds: " + ", ".join(f"{v:.4g}" for v in s_vals))
    if spectral:
        lines.append(f"spectral bottom {spectral['bottom']:.6g} at H = {spectral['H']}")
    lines.append("note: " + note)
    return lines


COMMANDS: dict[str, Callable] = {
    "generate": cmd_generate, "capacity": cmd_capacity, "classify-end": cmd_classify_end,
    "end-potential": cmd_end_potential, "multi-harmonic": cmd_multi_harmonic,
    "sobolev": cmd_sobolev, "lambda": cmd_lambda, "glue-check": cmd_glue_check,
    "volume-check": cmd_volume_check, "schrodinger-bottom": cmd_schrodinger_bottom,
    "corroborate": cmd_corroborate,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphpot", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"graphpot {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--seed", type=int, help="override the config seeds with one seed")
        sp.add_argument("--out", help="output directory (overrides output_dir)")
        sp.add_argument("--verbose", action="store_true", help="solver traces and debug logs")
    return ap


def load_config(path: str, seed: int | None) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if isinstance(raw, dict) and seed is not None:
        raw = {**raw, "seeds": [seed]}
    return ExperimentConfig.from_dict(raw)


def run(command: str, cfg: ExperimentConfig, out: str | None = None, verbose: bool = False) -> int:
    out_dir = Path(out or cfg.output_dir)
    hashed = {k: v for k, v in cfg.raw.items() if k != "output_dir"}
    art = Artifacts(out_dir, {"command": command, **hashed})
    try:
        lines = COMMANDS[command](cfg, art, verbose)
    except ConfigError as exc:
        for path in art.written:
            path.unlink(missing_ok=True)
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except GraphpotError as exc:
        diag = {"command": command, "error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, SolverError):
            diag.update(residual=exc.residual, iterations=exc.iterations)
        art.json("diagnostics.json", diag)
        print(f"error: {exc} (see {out_dir / 'diagnostics.json'})", file=sys.stderr)
        return 1
    print(f"graphpot {command} [config {art.hash[:12]}]")
    for line in lines:
        print("  " + line)
    print(f"artifacts: {', '.join(sorted(p.name for p in art.written))} in {out_dir}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(args.command, cfg, args.out, args.verbose)


if __name__ == "__main__":
    sys.exit(main())
