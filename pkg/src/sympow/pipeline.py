"""Job configuration, orchestration, caching, and report emission.

A job is one linear action: a field, generator matrices as text blocks, and
a degree range.  The pipeline decomposes every symmetric power once, then
runs the requested checks over the shared data.  Reports serialize to
canonical JSON (sorted keys, exact fraction strings); wall-clock timing and
cache counters live in a `volatile` section that the canonical form drops,
which is what makes the determinism contract byte-exact.

Degrees fan out over a process pool when jobs > 1.  A worker decomposes its
degree against a fresh registry and ships the indecomposable parts home as
plain integer lists; the parent matches them into the shared registry in
ascending-degree order, so ids come out identical to a sequential run.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import koszul as kz
from . import linalg as la
from .chars import char_growth_check, check_delta_vanishing, sym_brauer_sequence
from .geometry import fixed_dims, ramification
from .gf import make_field
from .groups import (CapacityError, GroupData, ModuleRep, Representation,
                     SYM_DIM_CAP, close_group, sym_power)
from .modules import (Registry, child_seed, decompose, load_registry,
                      save_registry)
from .polyfit import detect_description, growth_degree

VERSION = "0.1.0"

CHECKS = ("decompose", "description", "delta_vanishing", "growth",
          "ramification", "koszul", "surface_progression", "char_growth")

_NEED_VECTORS = {"decompose", "description", "surface_progression"}

CHAR_TABLE_MAX_N = 40


class ConfigError(ValueError):
    """A config file failed to parse or validate; the message names the offender."""


@dataclass
class JobConfig:
    p: int
    e: int
    generators: list[str]
    n_max: int
    seed: int
    checks: tuple[str, ...]
    m_candidates: list[int] | None = None
    cache_dir: str | None = None
    output_path: str | None = None
    output_format: str = "json"
    jobs: int = 1

    def echo(self) -> dict:
        """Analysis-relevant fields only: anything here may change results.

        Delivery knobs (output target, pool size, cache location) are echoed
        in the volatile section instead, so runs that differ only in where
        they write or how they parallelize stay byte-identical.
        """
        out = asdict(self)
        out["checks"] = sorted(self.checks)
        for key in ("cache_dir", "output_path", "output_format", "jobs"):
            del out[key]
        return out

    def delivery(self) -> dict:
        return {"cache_dir": self.cache_dir, "output_path": self.output_path,
                "output_format": self.output_format, "jobs": self.jobs}


def load_config(path: str) -> JobConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> JobConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    fld = raw.get("field")
    if not isinstance(fld, dict) or "p" not in fld:
        raise ConfigError("field {p, e} required")
    p, e = int(fld["p"]), int(fld.get("e", 1))
    try:
        F = make_field(p, e)
    except Exception as exc:
        raise ConfigError(f"bad field: {exc}") from None
    gens = raw.get("generators")
    if not isinstance(gens, list) or not gens or not all(isinstance(g, str) for g in gens):
        raise ConfigError("generators must be a nonempty list of matrix text blocks")
    size = None
    for i, text in enumerate(gens):
        try:
            A = la.mat_from_text(F, text)
        except ValueError as exc:
            raise ConfigError(f"generator {i}: {exc}") from None
        if A.shape[0] != A.shape[1]:
            raise ConfigError(f"generator {i} is not square: shape {A.shape}")
        if size is None:
            size = A.shape[0]
        elif A.shape[0] != size:
            raise ConfigError(f"generator {i} has size {A.shape[0]}, expected {size}")
    if "seed" not in raw:
        raise ConfigError("seed required")
    n_max = int(raw.get("n_max", 0))
    if n_max < 4:
        raise ConfigError("n_max must be at least 4")
    checks = raw.get("checks", list(CHECKS))
    unknown = [c for c in checks if c not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks: {unknown}; valid names are {list(CHECKS)}")
    m_cands = raw.get("m_candidates")
    if m_cands is not None:
        m_cands = [int(m) for m in m_cands]
        if any(m < 1 for m in m_cands):
            raise ConfigError("m_candidates must be positive")
    out = raw.get("output", {})
    fmt = out.get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError(f"output format must be json or csv, got {fmt!r}")
    return JobConfig(
        p=p, e=e, generators=list(gens), n_max=n_max, seed=int(raw["seed"]),
        checks=tuple(dict.fromkeys(checks)), m_candidates=m_cands,
        cache_dir=raw.get("cache_dir"), output_path=out.get("path"),
        output_format=fmt, jobs=int(raw.get("jobs", 1)),
    )


# -- cache ---------------------------------------------------------------------


def job_key(cfg: JobConfig) -> str:
    """Stable digest over field, normalized generator bytes, and version."""
    F = make_field(cfg.p, cfg.e)
    norm = [la.mat_to_text(F, la.mat_from_text(F, g)) for g in cfg.generators]
    payload = json.dumps({"p": cfg.p, "e": cfg.e, "generators": norm,
                          "version": VERSION}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def _sym_path(base: str, n: int) -> str:
    return os.path.join(base, "sym", f"{n}.json")


# -- per-degree decomposition --------------------------------------------------


def _decompose_degree(p: int, e: int, gen_texts: list[str], n: int, seed: int):
    """Decompose Sym^n against a fresh registry; parts travel as int lists.

    Entries come back in first-appearance order (ascending fresh-registry id),
    so the parent's match-or-insert sweep assigns the same ids a sequential
    run would.
    """
    F = make_field(p, e)
    rep = Representation(F, tuple(la.mat_from_text(F, t) for t in gen_texts))
    G = close_group(rep)
    reg = Registry(G)
    vec = decompose(sym_power(rep, G, n), reg, seed)
    entries = []
    for mid in sorted(vec):
        mod = reg.entries[mid]
        entries.append(([A.tolist() for A in mod.mats], mod.dim, int(vec[mid])))
    return n, entries


def _absorb(G: GroupData, registry: Registry, entries) -> dict[int, int]:
    vec: dict[int, int] = {}
    for mats, dim, mult in entries:
        mod = ModuleRep(G, [np.array(A, dtype=np.int64) for A in mats], dim=dim)
        mid = registry.match_or_insert(mod)
        vec[mid] = vec.get(mid, 0) + mult
    return vec


def _compute_vectors(cfg: JobConfig, G: GroupData, errors: dict):
    """(vectors, registry, cache stats) for n = 0..n_max, cache-aware.

    A capacity overflow at some degree records an error and keeps the prefix;
    later degrees can only be larger.
    """
    base = os.path.join(cfg.cache_dir, job_key(cfg)) if cfg.cache_dir else None
    registry = Registry(G)
    cached: dict[int, dict[int, int]] = {}
    if base and os.path.isdir(os.path.join(base, "registry")):
        registry = load_registry(os.path.join(base, "registry"), G)
        for n in range(cfg.n_max + 1):
            try:
                with open(_sym_path(base, n)) as fh:
                    raw = json.load(fh)
            except OSError:
                continue
            vec = {int(k): int(v) for k, v in raw["vec"].items()}
            if all(mid in registry.entries for mid in vec):
                cached[n] = vec
    missing = [n for n in range(cfg.n_max + 1) if n not in cached]
    results: dict[int, list] = {}
    stop_at = None
    if missing:
        tasks = [(cfg.p, cfg.e, cfg.generators, n, child_seed(cfg.seed, "sym", n))
                 for n in missing]
        if cfg.jobs > 1:
            with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
                futures = {pool.submit(_decompose_degree, *t): t[3] for t in tasks}
                for fut, n in futures.items():
                    try:
                        results[n] = fut.result()[1]
                    except Exception as exc:
                        stop_at = n if stop_at is None else min(stop_at, n)
                        errors[f"decompose_n{n}"] = f"{type(exc).__name__}: {exc}"
        else:
            for t in tasks:
                try:
                    results[t[3]] = _decompose_degree(*t)[1]
                except Exception as exc:
                    stop_at = t[3]
                    errors[f"decompose_n{t[3]}"] = f"{type(exc).__name__}: {exc}"
                    break
    vectors: dict[int, dict[int, int]] = {}
    for n in range(cfg.n_max + 1):
        if stop_at is not None and n >= stop_at:
            break
        if n in cached:
            vectors[n] = cached[n]
        elif n in results:
            vectors[n] = _absorb(G, registry, results[n])
        else:
            break
    if base and results:
        os.makedirs(os.path.join(base, "sym"), exist_ok=True)
        save_registry(registry, os.path.join(base, "registry"))
        for n, vec in vectors.items():
            if n in cached:
                continue
            with open(_sym_path(base, n), "w") as fh:
                json.dump({"n": n, "vec": {str(k): v for k, v in sorted(vec.items())}},
                          fh, sort_keys=True)
                fh.write("\n")
    stats = {"hits": len(cached), "misses": len(results)}
    return vectors, registry, stats


# -- checks ----------------------------------------------------------------------


def _divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def _char_window(d1: int, stride: int, floor: int, want: int) -> int:
    """Largest window <= want (but >= floor) whose top degree fits the sym cap."""
    nw = want
    while nw > floor and math.comb(stride * nw + stride - 1 + d1 - 1, d1 - 1) > SYM_DIM_CAP:
        nw -= 1
    return nw


def _run_description(cfg: JobConfig, G: GroupData, vectors) -> dict:
    seq = [vectors[n] for n in sorted(vectors)]
    cands = cfg.m_candidates or _divisors(G.order ** 2)
    desc = detect_description(seq, cands, dmax=G.dim - 1, holdout=3)
    if desc is None:
        return {"found": False}
    return {"found": True, **desc.to_json()}


def _run_delta(cfg: JobConfig, rep: Representation, G: GroupData) -> dict:
    d = G.dim - 1
    m = G.order ** 2
    hi, lo = d + 1, d
    nw = _char_window(G.dim, m, hi + 1, max(hi + 3, 8))
    if nw <= hi:
        raise CapacityError("stride too large for a difference window under the sym cap")
    hi_reports = [check_delta_vanishing(rep, G, j, m, hi, nw) for j in range(m)]
    lo_reports = [check_delta_vanishing(rep, G, j, m, lo, nw) for j in range(m)]
    return {
        "stride": m,
        "window": nw,
        "order_hi": hi_reports,
        "order_lo": lo_reports,
        "all_vanish_hi": all(r["vanishes_from"] is not None for r in hi_reports),
        "any_vanish_lo": any(r["vanishes_from"] is not None for r in lo_reports),
    }


def _run_growth(cfg: JobConfig, G: GroupData) -> dict:
    d = G.dim - 1
    dims = [math.comb(n + d, d) for n in range(cfg.n_max + 1)]
    fit = growth_degree(dims, 1)
    fit["expected_degree"] = d
    return fit


def _run_koszul(cfg: JobConfig, G: GroupData, registry: Registry, vectors) -> dict:
    d = G.dim - 1
    forms, m = kz.choose_forms(G, d, child_seed(cfg.seed, "forms"))
    js = range(m) if m <= 4 else range(2)
    seed = child_seed(cfg.seed, "koszul")
    entries = []
    for t in range(d, d + 3):
        for j in js:
            K = kz.build_complex(G, forms, t=t, j=j)
            ex = kz.check_exact(K)
            sp = kz.check_split_stagewise(K, registry, seed, sym_vectors=vectors)
            entry = {
                "t": t,
                "j": j,
                "exact": ex["exact"],
                "coker_dim": ex["coker_dim"],
                "stages": [{"r": s["r"], "split": s["split"]} for s in sp["stages"]],
                "all_split": sp["all_split"],
                "coker_free": sp["coker_free"],
                "euler_free_multiple": None,
            }
            need = {m * (t - r) + j for r in range(d + 1)}
            if vectors is not None and need <= set(vectors):
                entry["euler_free_multiple"] = kz.euler_identity(
                    registry, vectors, d, m, j, t, seed)["free_multiple"]
            entries.append(entry)
    return {"form_degree": m, "complexes": entries}


def _run_surface(cfg: JobConfig, G: GroupData, registry: Registry, vectors) -> dict:
    m = G.order
    n_top = max(vectors, default=-1)
    seed = child_seed(cfg.seed, "surface")
    out = []
    for j in range(min(m, 4)):
        ts = range(1, (n_top - j) // m + 1)
        if len(ts) < 3:
            raise ValueError("n_max too small for a progression window at stride #G")
        out.append(kz.surface_progression_check(registry, vectors, m, j, ts, seed))
    return {"stride": m, "progressions": out}


def _run_char_growth(cfg: JobConfig, rep: Representation, G: GroupData) -> dict:
    reports = []
    for g in G.p_regular_class_reps():
        d_fix = max((dim for _, dim in fixed_dims(G, g)), default=-1)
        floor = d_fix + 3
        nw = _char_window(G.dim, G.order, floor, max(floor, 10))
        reports.append(char_growth_check(rep, G, g, 0, d_fix, nw))
    return {"classes": reports, "ok": all(r["ok"] for r in reports)}


def _char_table(cfg: JobConfig, rep: Representation, G: GroupData) -> dict:
    top = min(cfg.n_max, CHAR_TABLE_MAX_N)
    chars = sym_brauer_sequence(rep, G, range(top + 1))
    values = {n: {r: list(chars[n].values[r]) for r in chars[n].reps} for n in range(top + 1)}
    return {"modulus": chars[0].modulus, "n_max": top, "values": values}


def run(cfg: JobConfig) -> dict:
    """Execute the requested checks; failures are recorded, not raised.

    The returned report is deterministic given (config, seed, version) once
    the volatile section is dropped; `canonical_json` does exactly that.
    """
    t0 = time.monotonic()
    F = make_field(cfg.p, cfg.e)
    rep = Representation(F, tuple(la.mat_from_text(F, g) for g in cfg.generators))
    G = close_group(rep)
    checks: dict = {}
    errors: dict = {}
    echo = cfg.echo()
    echo["m_candidates"] = cfg.m_candidates or _divisors(G.order ** 2)
    report = {
        "artifact_version": VERSION,
        "echo": echo,
        "group": {"order": G.order, "dim": G.dim, "p_part": G.p_part},
        "checks": checks,
        "errors": errors,
        "volatile": {"delivery": cfg.delivery()},
    }
    vectors = registry = None
    if _NEED_VECTORS & set(cfg.checks):
        vectors, registry, stats = _compute_vectors(cfg, G, errors)
        report["volatile"]["cache"] = stats
        if "decompose" in cfg.checks:
            checks["decompose"] = {
                "vectors": {n: dict(sorted(v.items())) for n, v in vectors.items()},
                "registry_size": len(registry.entries),
                "class_dims": {mid: registry.entries[mid].dim for mid in registry.entries},
            }
        try:
            checks["characters"] = _char_table(cfg, rep, G)
        except Exception as exc:
            errors["characters"] = f"{type(exc).__name__}: {exc}"

    def guarded(name, fn, *args):
        if name not in cfg.checks:
            return
        try:
            checks[name] = fn(*args)
        except Exception as exc:
            errors[name] = f"{type(exc).__name__}: {exc}"

    guarded("description", _run_description, cfg, G, vectors)
    guarded("delta_vanishing", _run_delta, cfg, rep, G)
    guarded("growth", _run_growth, cfg, G)
    guarded("ramification", lambda: ramification(G).to_json())
    if "koszul" in cfg.checks and registry is None:
        registry = Registry(G)
    guarded("koszul", _run_koszul, cfg, G, registry, vectors)
    guarded("surface_progression", _run_surface, cfg, G, registry, vectors)
    guarded("char_growth", _run_char_growth, cfg, rep, G)
    report["volatile"]["elapsed_s"] = round(time.monotonic() - t0, 3)
    return report


def run_single(cfg: JobConfig, n: int) -> dict:
    """Decompose one symmetric power, reusing the cache read-only.

    Only full `analyze` sweeps write the cache: they assign registry ids in
    ascending-degree first-appearance order, and a stray single-degree write
    would bake a different id numbering into the shared registry.
    """
    F = make_field(cfg.p, cfg.e)
    rep = Representation(F, tuple(la.mat_from_text(F, g) for g in cfg.generators))
    G = close_group(rep)
    base = os.path.join(cfg.cache_dir, job_key(cfg)) if cfg.cache_dir else None
    registry = Registry(G)
    vec = None
    if base and os.path.isdir(os.path.join(base, "registry")):
        registry = load_registry(os.path.join(base, "registry"), G)
        try:
            with open(_sym_path(base, n)) as fh:
                raw = json.load(fh)
            cand = {int(k): int(v) for k, v in raw["vec"].items()}
            if all(mid in registry.entries for mid in cand):
                vec = cand
        except OSError:
            pass
    if vec is None:
        entries = _decompose_degree(cfg.p, cfg.e, cfg.generators, n,
                                    child_seed(cfg.seed, "sym", n))[1]
        vec = _absorb(G, registry, entries)
    return {
        "artifact_version": VERSION,
        "n": n,
        "vec": dict(sorted(vec.items())),
        "class_dims": {mid: registry.entries[mid].dim for mid in sorted(vec)},
    }


# -- emission ------------------------------------------------------------------


def _jsonify(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def canonical_json(report: dict) -> str:
    """Sorted-key JSON with the volatile section removed; the determinism unit."""
    slim = {k: v for k, v in report.items() if k != "volatile"}
    return json.dumps(slim, sort_keys=True, indent=1, default=_jsonify) + "\n"


def _csv_decompositions(report: dict) -> str | None:
    dec = report["checks"].get("decompose")
    if dec is None:
        return None
    lines = ["n,id,mult"]
    for n in sorted(dec["vectors"]):
        for mid in sorted(dec["vectors"][n]):
            lines.append(f"{n},{mid},{dec['vectors'][n][mid]}")
    return "\n".join(lines) + "\n"


def _csv_characters(report: dict) -> str | None:
    chars = report["checks"].get("characters")
    if chars is None:
        return None
    lines = ["n,class_rep,coord,value"]
    for n in sorted(chars["values"]):
        for r in sorted(chars["values"][n]):
            for coord, v in enumerate(chars["values"][n][r]):
                lines.append(f"{n},{r},{coord},{v}")
    return "\n".join(lines) + "\n"


def _csv_growth(report: dict) -> str | None:
    fit = report["checks"].get("growth")
    if fit is None:
        return None
    lines = ["residue,degree,coeffs"]
    for res in fit["residues"]:
        coeffs = ";".join(res.get("coeffs", []))
        lines.append(f"{res['a']},{res['degree']},{coeffs}")
    return "\n".join(lines) + "\n"


def emit(report: dict, fmt: str, path: str | None) -> list[str]:
    """Write the report; JSON to one file, CSV tables into a directory."""
    if fmt == "json":
        text = canonical_json(report)
        if path is None:
            print(text, end="")
            return []
        with open(path, "w") as fh:
            fh.write(text)
        return [path]
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    outdir = path or "."
    os.makedirs(outdir, exist_ok=True)
    written = []
    tables = {
        "decompositions.csv": _csv_decompositions(report),
        "characters.csv": _csv_characters(report),
        "growth.csv": _csv_growth(report),
    }
    for name, text in tables.items():
        if text is None:
            continue
        target = os.path.join(outdir, name)
        with open(target, "w") as fh:
            fh.write(text)
        written.append(target)
    return written
