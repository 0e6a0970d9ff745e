"""Command-line front end.

Each subcommand writes its artifacts into ``--out`` and a ``summary.json``
with ``"status": "pass" | "fail"`` and a ``failures`` list. Exit status is
0 on success, 1 on a failed check and 2 on invalid configuration or a
refused computation.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path


from . import artifacts
from .bands import droplet_band, eigenpairs_below
from .ct_verifier import eigenstate_decay_check, projector_decay_check, verify_ct_grid
from .gap_certifier import (
    certify,
    certify_from_quantities,
    chain_bulk_quantities,
    chain_gamma,
    partition_by_surface,
    strip_bulk_quantities,
    verify_certificate,
)
from .graph_core import (
    BaseGraph,
    build_lattice_window,
    compensating_boundary_field,
    graph_to_json,
    load_field,
    load_graph,
)
from .isoperimetry import brute_force_surface_levels, thresholds
from .oracles import block_oracle, degree_growth, distance_oracle
from .spectral import DEFAULT_SEED, DENSE_CAP, dense_spectrum, extremal_eigs
from .sym_product import SymSpace
from .xxz_operator import HamiltonianSpec, build_hamiltonian

__all__ = ["main", "run", "ConfigError", "KINDS"]

log = logging.getLogger("xxzdrop")

KINDS = (
    "build-graph",
    "spectrum",
    "droplet-bands",
    "isoperimetric",
    "certify-gap",
    "ct-verify",
    "eigenstate-decay",
    "projector-decay",
    "oracle-check",
)

DEFAULTS = {
    "graph": None,
    "family": None,
    "dims": None,
    "delta": None,
    "particles": None,
    "k": 1,
    "field": "none",
    "out": "runs",
    "seed": DEFAULT_SEED,
    "dense_cap": DENSE_CAP,
    "enum_cap": 10_000_000,
    "workers": 1,
    "count": None,
    "cutoff": None,
    "constraint": "none",
    "measure": None,
    "offsets": None,
    "imag_shift": 0.0,
    "pair_family": "singleton_pairs",
    "a2_mode": "lanczos",
}

NEEDS = {
    "build-graph": (),
    "spectrum": ("delta", "particles"),
    "droplet-bands": ("delta", "particles"),
    "isoperimetric": ("particles",),
    "certify-gap": ("delta", "particles", "k"),
    "ct-verify": ("delta", "particles", "k", "offsets"),
    "eigenstate-decay": ("delta", "particles", "k"),
    "projector-decay": ("delta", "particles", "k"),
    "oracle-check": ("delta",),
}


class ConfigError(ValueError):
    """Invalid experiment configuration; the message starts with the field path."""


def _particles(value) -> list[int]:
    if value is None:
        return []
    if isinstance(value, int):
        return [value]
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    text = str(value)
    out = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def validate(cfg: dict) -> dict:
    cfg = {**DEFAULTS, **{k: v for k, v in cfg.items() if v is not None}}
    kind = cfg.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"config.kind: expected one of {', '.join(KINDS)}, got {kind!r}")
    if cfg["graph"] is None and cfg["family"] is None:
        raise ConfigError("config.graph: give a graph file or config.family with config.dims")
    if cfg["graph"] is not None and not Path(cfg["graph"]).is_file():
        raise ConfigError(f"config.graph: file {cfg['graph']} does not exist")
    if cfg["family"] is not None:
        if cfg["family"] not in ("path", "strip", "grid2d"):
            raise ConfigError(f"config.family: unknown family {cfg['family']!r}")
        if not cfg["dims"]:
            raise ConfigError("config.dims: required with config.family")
    for key in NEEDS[kind]:
        if cfg.get(key) is None:
            raise ConfigError(f"config.{key}: required for kind {kind}")
    if cfg["delta"] is not None:
        cfg["delta"] = float(cfg["delta"])
        if not cfg["delta"] > 1:
            raise ConfigError(f"config.delta: anisotropy must exceed 1, got {cfg['delta']}")
    try:
        cfg["particles"] = _particles(cfg["particles"])
    except ValueError:
        raise ConfigError(f"config.particles: cannot parse {cfg['particles']!r}") from None
    for key in ("dense_cap", "enum_cap", "workers"):
        if int(cfg[key]) <= 0:
            raise ConfigError(f"config.{key}: must be positive")
        cfg[key] = int(cfg[key])
    if int(cfg["k"]) < 0:
        raise ConfigError("config.k: must be nonnegative")
    cfg["k"] = int(cfg["k"])
    fld = cfg["field"]
    if fld not in ("none", "compensating"):
        path = fld[5:] if str(fld).startswith("file:") else fld
        if not Path(path).is_file():
            raise ConfigError(f"config.field: expected none, compensating or a field file, got {fld!r}")
        cfg["field"] = f"file:{path}"
    if cfg["offsets"] is not None:
        if isinstance(cfg["offsets"], str):
            cfg["offsets"] = [float(v) for v in cfg["offsets"].split(",") if v]
        cfg["offsets"] = [float(v) for v in cfg["offsets"]]
    if cfg["measure"] is None:
        cfg["measure"] = "lattice" if cfg["field"] == "compensating" else "graph"
    if cfg["measure"] not in ("graph", "lattice"):
        raise ConfigError(f"config.measure: unknown surface measure {cfg['measure']!r}")
    return cfg


def _graph(cfg) -> BaseGraph:
    if cfg["graph"] is not None:
        return load_graph(cfg["graph"])
    return build_lattice_window(cfg["family"], cfg["dims"])


def _field(cfg, G):
    if cfg["field"] == "none":
        return None
    if cfg["field"] == "compensating":
        return compensating_boundary_field(G, cfg["delta"])
    return load_field(cfg["field"][5:], G.vertex_count)


def _space(cfg, G, N) -> SymSpace:
    return SymSpace(G, N, workers=cfg["workers"])


class _Run:
    def __init__(self, cfg):
        self.cfg = cfg
        self.out = Path(cfg["out"])
        self.summary: dict = {"kind": cfg["kind"]}
        self.failures: list[dict] = []

    def fail(self, check: str, **detail):
        self.failures.append({"check": check, **detail})

    def write(self, name: str, text: str):
        artifacts.write_text(self.out / name, text)

    def json(self, name: str, obj):
        artifacts.write_json(self.out / name, obj)


def _graph_summary(G: BaseGraph) -> dict:
    return {"vertex_count": G.vertex_count, "edges": len(G.edges), "max_degree": G.max_degree,
            "regular": G.is_regular, "family": G.family, "graph_hash": G.digest()}


def _build_graph(r: _Run, G, F):
    r.write("graph.json", graph_to_json(G) + "\n")
    r.summary.update(_graph_summary(G))


def _spectrum(r: _Run, G, F):
    cfg = r.cfg
    rows = {}
    for N in cfg["particles"]:
        space = _space(cfg, G, N)
        op = build_hamiltonian(HamiltonianSpec(G, N, cfg["delta"], F), space)
        if op.dimension <= cfg["dense_cap"] and cfg["count"] is None:
            res = dense_spectrum(op, cfg["dense_cap"], vectors=False)
        else:
            count = min(cfg["count"] or 10, op.dimension)
            res = extremal_eigs(op, count, seed=cfg["seed"], vectors=False)
        name = f"spectrum_N{N}.csv" if len(cfg["particles"]) > 1 else "spectrum.csv"
        r.write(name, artifacts.spectrum_csv(res.eigenvalues))
        rows[str(N)] = {"method": res.method, "dimension": op.dimension,
                        "min": float(res.eigenvalues[0]), "count": len(res.eigenvalues)}
        bound = 0.5 * (1 - 1 / cfg["delta"])
        if N >= 1 and (space.surfaces >= 1).all() and res.eigenvalues[0] < bound - 1e-10:
            r.fail("ground-state bound", N=N, min=float(res.eigenvalues[0]), bound=bound)
    r.summary["spectra"] = rows


def _droplet_bands(r: _Run, G, F):
    cfg = r.cfg
    out = {}
    for N in cfg["particles"]:
        rep = droplet_band(G, N, cfg["delta"], F, dense_cap=cfg["dense_cap"],
                           workers=cfg["workers"], seed=cfg["seed"])
        out[str(N)] = rep.to_json()
        out[str(N)]["bulk_edge_errors"] = list(rep.edge_errors("bulk"))
    r.json("bands.json", out)
    r.summary["bands"] = {N: {"edges_bulk": v["edges_bulk"], "formula_cosh": v["formula_cosh"],
                              "boundary_states": len(v["boundary_states"])} for N, v in out.items()}


def _isoperimetric(r: _Run, G, F):
    cfg = r.cfg
    cats = {}
    for N in cfg["particles"]:
        cat = brute_force_surface_levels(G, N, cfg["constraint"], cfg["measure"], cfg["enum_cap"],
                                         space=_space(cfg, G, N))
        cats[str(N)] = cat.to_json()
        cats[str(N)]["k_set_sizes"] = {str(k): int((cat.surfaces < cat.D_min + k).sum()) for k in range(4)}
        if cfg["delta"] is not None:
            e_k, window = thresholds(cat, cfg["delta"], cfg["k"])
            cats[str(N)]["E_threshold"] = e_k
            cats[str(N)]["droplet_window"] = list(window)
    r.json("catalog.json", cats)
    r.summary["D_min"] = {N: c["D_min"] for N, c in cats.items()}


def _strip_width(G) -> int:
    return len({lbl[1] for lbl in G.labels})


def _default_cutoff(cfg, G, N, k):
    if cfg["cutoff"] is not None:
        return int(cfg["cutoff"])
    if G.family == "path":
        return 2 * k
    if G.family == "strip":
        return 2 * _strip_width(G)
    if G.family == "grid2d":
        s = math.isqrt(N)
        if s * s == N:
            return 4 * s
    raise ConfigError("config.cutoff: required for this graph")


def _certify_gap(r: _Run, G, F):
    cfg = r.cfg
    k = cfg["k"]
    if G.family == "path":
        # surfaces the hypothesis of the chain result before any work
        r.summary["chain_gamma"] = list(chain_gamma(cfg["delta"], k))
    certs = {}
    for N in cfg["particles"]:
        space = _space(cfg, G, N)
        spec = HamiltonianSpec(G, N, cfg["delta"], F)
        surface = space.lattice_surfaces if cfg["measure"] == "lattice" else None
        part = partition_by_surface(space, _default_cutoff(cfg, G, N, k), surface)
        cert = certify(spec, part, space, cfg["a2_mode"])
        entry = {"certificate": cert.to_json()}
        if space.dimension <= cfg["dense_cap"]:
            ver = verify_certificate(cert, spec, space, cfg["dense_cap"])
            entry["verification"] = ver
            if not ver["clause_i"]:
                r.fail("spectrum avoidance", N=N, inside=ver["inside"])
            if not ver["clause_ii"]:
                r.fail("eigenvalue count", N=N, count=ver["count_below"], v2=ver["v2_size"])
        if G.family == "path":
            bulk = certify_from_quantities(**chain_bulk_quantities(cfg["delta"], k)).interval
            entry["bulk_interval"] = list(bulk) if bulk else None
        elif G.family == "strip":
            bulk = certify_from_quantities(**strip_bulk_quantities(cfg["delta"], _strip_width(G))).interval
            entry["bulk_interval"] = list(bulk) if bulk else None
        certs[str(N)] = entry
    r.json("certificate.json", certs)
    r.summary["certificates"] = {N: e["certificate"]["interval"] for N, e in certs.items()}


def _catalog(cfg, G, N, space):
    return brute_force_surface_levels(G, N, "none", cfg["measure"], cfg["enum_cap"], space=space)


def _ct_verify(r: _Run, G, F):
    cfg = r.cfg
    parts = []
    for N in cfg["particles"]:
        space = _space(cfg, G, N)
        spec = HamiltonianSpec(G, N, cfg["delta"], F)
        cat = _catalog(cfg, G, N, space)
        rep = verify_ct_grid(spec, cat, cfg["k"], cfg["offsets"], pair_family=cfg["pair_family"],
                             imag_shift=cfg["imag_shift"], space=space, dense_cap=cfg["dense_cap"])
        parts.append((N, rep))
        if rep.violations:
            r.fail("combes-thomas bound", N=N, violations=rep.violations, max_ratio=rep.max_ratio)
    text = "".join(rep.to_csv() if i == 0 else rep.to_csv().split("\n", 1)[1]
                   for i, (_, rep) in enumerate(parts))
    r.write("ct_report.csv", text)
    r.summary["ct"] = {str(N): rep.summary() for N, rep in parts}


def _eigenstate_decay(r: _Run, G, F):
    cfg = r.cfg
    out = {}
    for N in cfg["particles"]:
        space = _space(cfg, G, N)
        spec = HamiltonianSpec(G, N, cfg["delta"], F)
        cat = _catalog(cfg, G, N, space)
        e_k, _ = thresholds(cat, cfg["delta"], cfg["k"])
        res = eigenpairs_below(build_hamiltonian(spec, space), e_k, dense_cap=cfg["dense_cap"],
                               seed=cfg["seed"])
        count = min(cfg["count"] or 5, len(res.eigenvalues))
        rows = [eigenstate_decay_check(spec, cat, cfg["k"], float(res.eigenvalues[i]),
                                       res.eigenvectors[:, i], space) for i in range(count)]
        for i, row in enumerate(rows):
            if not row["pass"]:
                r.fail("eigenstate bound", N=N, state=i)
        out[str(N)] = rows
    r.json("decay.json", out)
    r.summary["eigenstates"] = {N: [[row["E"], row["gamma"], row["fitted_rate"]] for row in rows]
                                for N, rows in out.items()}


def _projector_decay(r: _Run, G, F):
    cfg = r.cfg
    out = {}
    for N in cfg["particles"]:
        space = _space(cfg, G, N)
        spec = HamiltonianSpec(G, N, cfg["delta"], F)
        cat = _catalog(cfg, G, N, space)
        rep = projector_decay_check(spec, cat, cfg["k"], space=space, dense_cap=cfg["dense_cap"])
        if not rep["pass"]:
            r.fail("projector decay rate", N=N, rate=rep["fitted_rate"], eta=rep["eta"])
        out[str(N)] = rep
    r.json("projector.json", out)
    r.summary["projector"] = {N: [v["eta"], v["fitted_rate"]] for N, v in out.items()}


def _oracle_check(r: _Run, G, F):
    cfg = r.cfg
    blocks = block_oracle(G, cfg["delta"], F)
    if blocks["leakage"] != 0 or blocks["max_deviation"] >= 1e-12:
        r.fail("block decomposition", **blocks)
    Ns = cfg["particles"] or list(range(1, min(G.vertex_count, 4) + 1))
    dist, growth = {}, {}
    for N in Ns:
        if N >= G.vertex_count:
            continue
        space = _space(cfg, G, N)
        sample = None if space.dimension <= 60 else 500
        dist[str(N)] = distance_oracle(G, N, sample=sample, rng=cfg["seed"])
        growth[str(N)] = degree_growth(G, N, space)
        if dist[str(N)]["mismatches"]:
            r.fail("distance formula", N=N, mismatches=dist[str(N)]["mismatches"][:5])
        if not growth[str(N)]["ok"]:
            r.fail("degree growth", N=N, **growth[str(N)])
    report = {"block": blocks, "distance": dist, "degree_growth": growth}
    r.json("oracles.json", report)
    r.summary.update(report)


HANDLERS = {
    "build-graph": _build_graph,
    "spectrum": _spectrum,
    "droplet-bands": _droplet_bands,
    "isoperimetric": _isoperimetric,
    "certify-gap": _certify_gap,
    "ct-verify": _ct_verify,
    "eigenstate-decay": _eigenstate_decay,
    "projector-decay": _projector_decay,
    "oracle-check": _oracle_check,
}


def run(config: dict) -> int:
    """Run one experiment; returns the process exit status."""
    try:
        cfg = validate(config)
    except ConfigError as exc:
        log.error("%s", exc)
        return 2
    r = _Run(cfg)
    try:
        G = _graph(cfg)
        F = _field(cfg, G)
        r.summary["graph"] = _graph_summary(G)
        r.summary["config"] = {k: cfg[k] for k in sorted(cfg) if k not in ("out", "workers")}
        HANDLERS[cfg["kind"]](r, G, F)
    except ConfigError as exc:
        log.error("%s", exc)
        return 2
    except (ValueError, RuntimeError) as exc:
        r.summary["status"] = "error"
        r.summary["failures"] = [{"check": "exception", "type": type(exc).__name__, "message": str(exc)}]
        r.json("summary.json", r.summary)
        log.error("%s: %s", type(exc).__name__, exc)
        return 2
    r.summary["status"] = "fail" if r.failures else "pass"
    r.summary["failures"] = r.failures
    r.json("summary.json", r.summary)
    for f in r.failures:
        log.error("check failed: %s", json.dumps(f, default=str))
    return 1 if r.failures else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xxzdrop", description=__doc__.splitlines()[0])
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--config", help="JSON file with the same keys as the flags")
    p.add_argument("--graph", help="graph JSON file")
    p.add_argument("--family", choices=["path", "strip", "grid2d"])
    p.add_argument("--dims", type=int, nargs="+")
    p.add_argument("--delta", type=float, help="anisotropy, > 1")
    p.add_argument("--particles", help="N, a list '1,2' or a range '1-4'")
    p.add_argument("--k", type=int)
    p.add_argument("--field", help="none, compensating, or a field JSON file")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--dense-cap", type=int)
    p.add_argument("--enum-cap", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--count", type=int, help="number of eigenpairs")
    p.add_argument("--cutoff", type=int, help="surface cutoff of the V2 block")
    p.add_argument("--constraint", choices=["none", "bulk"])
    p.add_argument("--measure", choices=["graph", "lattice"])
    p.add_argument("--offsets", help="comma-separated energy offsets for ct-verify")
    p.add_argument("--imag-shift", type=float)
    p.add_argument("--pair-family", choices=["singleton_pairs", "set_to_droplets"])
    p.add_argument("--a2-mode", choices=["lanczos", "degree"])
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            log.error("config: cannot read %s: %s", args.config, exc)
            return 2
    flags = {k: v for k, v in vars(args).items() if k not in ("config", "verbose") and v is not None}
    cfg.update(flags)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
