"""Batch orchestration: config validation, solve -> classify -> verify, JSON reports."""

from __future__ import annotations

import copy
import os
from concurrent.futures import ThreadPoolExecutor

import jsonschema
import numpy as np

from . import __version__
from .classify import check_lemma, classify
from .completeness import completeness_report, expected_count
from .errors import BetheError, InvalidInputError
from .identities import (IdentityQuery, eval_F, eval_G, sz0_sum_rule, twist_matches_m,
                         tz_residues, xxx_periodic_relation)
from .model import Family, ModelSpec, Sector, normalized_residual
from .polysolve import SolverConfig, solve

TASKS = ("solve", "classify", "identities", "sumrules", "count")
DEFAULT_TOL_IDENTITY = 1e-8
DEFAULT_TOL_SUMRULE = 1e-10

_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_INTS = {"type": "array", "items": {"type": "integer"}}

INSTANCE_SCHEMA = {
    "type": "object",
    "required": ["family", "two_ell", "z", "mu", "k", "tasks"],
    "additionalProperties": False,
    "properties": {
        "label": {"type": "string"},
        "family": {"enum": ["xxx", "xxz"]},
        "two_ell": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "z": {"type": "array", "items": _COMPLEX, "minItems": 1},
        "mu": _COMPLEX,
        "gamma": _COMPLEX,
        "k": {"type": "integer", "minimum": 0},
        "tasks": {"type": "array", "items": {"enum": list(TASKS)}, "minItems": 1,
                  "uniqueItems": True},
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "newton_max_iter": {"type": "integer", "minimum": 1},
                "newton_tol": {"type": "number", "exclusiveMinimum": 0},
                "dedup_tol": {"type": "number", "exclusiveMinimum": 0},
                "max_starts": {"type": "integer", "minimum": 0},
                "expected_count": {"type": "integer", "minimum": 0},
            },
        },
        "identity_shifts": _INTS,
        "sumrule_ms": _INTS,
        "seed": {"type": "integer"},
    },
}


class ConfigError(Exception):
    """Config failed validation; ``problems`` lists ``(field path, message)``."""

    def __init__(self, problems):
        self.problems = problems
        super().__init__("; ".join(f"{p}: {m}" for p, m in problems))


def _path(prefix, parts):
    out = prefix
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def _cplx(pair):
    return complex(pair[0], pair[1])


def _pair(c):
    c = complex(c)
    return [c.real, c.imag]


def _instances(doc):
    if isinstance(doc, dict) and "instances" in doc:
        extra = set(doc) - {"instances"}
        if extra:
            raise ConfigError([("<root>", f"unexpected keys {sorted(extra)} next to 'instances'")])
        if not isinstance(doc["instances"], list) or not doc["instances"]:
            raise ConfigError([("instances", "must be a nonempty array")])
        return [(f"instances[{i}]", inst) for i, inst in enumerate(doc["instances"])]
    return [("", doc)]


def validate_config(doc):
    """Check a config document and return instances with defaults filled in."""
    validator = jsonschema.Draft7Validator(INSTANCE_SCHEMA)
    problems, out = [], []
    for prefix, inst in _instances(doc):
        errs = sorted(validator.iter_errors(inst), key=lambda e: list(e.absolute_path))
        problems.extend((_path(prefix, e.absolute_path), e.message) for e in errs)
        if errs:
            continue
        inst = copy.deepcopy(inst)
        inst.setdefault("identity_shifts", [-2, -1, 0, 1, 2])
        inst.setdefault("sumrule_ms", [0])
        inst.setdefault("seed", 42)
        inst.setdefault("solver", {})
        if "identities" in inst["tasks"] and "solve" not in inst["tasks"]:
            problems.append((_path(prefix, ["tasks"]), "task 'identities' requires task 'solve'"))
        if len(inst["z"]) != len(inst["two_ell"]):
            problems.append((_path(prefix, ["z"]), "length must match two_ell"))
        if inst["family"] == "xxz" and "gamma" not in inst:
            problems.append((_path(prefix, ["gamma"]), "required for family 'xxz'"))
        solver = inst["solver"]
        nt = solver.get("newton_tol", SolverConfig.newton_tol)
        dt = solver.get("dedup_tol", SolverConfig.dedup_tol)
        if not nt < dt:
            problems.append((_path(prefix, ["solver", "newton_tol"]),
                             f"newton_tol ({nt}) must be smaller than dedup_tol ({dt})"))
        if not problems:
            try:
                _build_spec(inst)
            except BetheError as exc:
                problems.append((prefix or "<root>", str(exc)))
        out.append(inst)
    if problems:
        raise ConfigError(problems)
    return out


def _build_spec(inst):
    gamma = _cplx(inst["gamma"]) if "gamma" in inst else None
    return ModelSpec(inst["family"], inst["two_ell"], [_cplx(p) for p in inst["z"]],
                     mu=_cplx(inst["mu"]), gamma=gamma)


def preset_fm(n):
    """Config for the homogeneous periodic spin-1/2 XXZ chain, one instance per k <= n/2.

    Each instance checks the sum rule at its only admissible ``m = S_z``.
    """
    if not isinstance(n, int) or n < 2 or n % 2:
        raise InvalidInputError(f"preset needs an even number of sites >= 2, got {n}")
    instances = []
    for k in range(n // 2 + 1):
        instances.append({
            "label": f"six-vertex N={n} k={k}",
            "family": "xxz", "two_ell": [1] * n, "z": [[1.0, 0.0]] * n,
            "mu": [0.0, 0.0], "gamma": [0.6, 0.0], "k": k,
            "tasks": list(TASKS), "sumrule_ms": [n // 2 - k],
        })
    return {"instances": instances}


def _identity_records(spec, sector, rs, shifts, tol):
    out = []
    for n in shifts:
        query = IdentityQuery.shifted(spec, n)
        rec = {"n": n, "alpha": _pair(query.alpha)}
        try:
            val = (eval_F if spec.family is Family.XXX else eval_G)(spec, sector, query, rs)
        except BetheError as exc:
            rec.update(error=str(exc), passed=False)
        else:
            rec.update(val.to_dict(), passed=val.normalized <= tol)
        out.append(rec)
    return out


def _sumrule_records(spec, sector, rs, ms, tol):
    t = rs.array()
    if spec.family is Family.XXX:
        if not spec.is_periodic():
            return [{"rule": "xxx_periodic", "applicable": False}]
        defect = xxx_periodic_relation(spec, sector, rs)
        if sum(spec.two_ell) == 2 * sector.k:
            rule = "sum_t"
            scale = max(1.0, abs(t.sum()), abs(sum(l * z for l, z in zip(spec.ell, spec.z))))
        else:
            rule = "residue_at_infinity"
            scale = eval_F(spec, sector, IdentityQuery(0j), rs).scale or 1.0
        norm = abs(defect) / scale
        return [{"rule": rule, "applicable": True, "defect": _pair(defect),
                 "normalized": norm, "passed": norm <= tol}]
    out = []
    for m in ms:
        ok, _ = twist_matches_m(spec, sector, m)
        if not ok:
            out.append({"m": m, "applicable": False})
            continue
        r0, ri = tz_residues(spec, sector, m, rs)
        scale = max(abs(r0), abs(ri))
        norm = abs(r0 + ri) / scale if scale > 0 else 0.0
        rec = {"m": m, "applicable": True, "res0": _pair(r0), "res_inf": _pair(ri),
               "defect": _pair(r0 + ri), "normalized": norm, "passed": norm <= tol}
        if sector.two_sz == 0 and m in (-1, 0, 1):
            rec["closed_form_defect"] = _pair(sz0_sum_rule(spec, sector, m, rs))
        out.append(rec)
    return out


def run_instance(inst, tasks=None, tol_identity=DEFAULT_TOL_IDENTITY,
                 tol_sumrule=DEFAULT_TOL_SUMRULE):
    """Run one validated instance; returns its report section."""
    tasks = set(inst["tasks"] if tasks is None else tasks)
    spec = _build_spec(inst)
    sector = Sector.of(spec, inst["k"])
    expected, _ = expected_count(spec, sector)
    solver = dict(inst["solver"])
    solver.setdefault("expected_count", expected)
    cfg = SolverConfig(rng_seed=inst["seed"], **solver)
    outcome = solve(spec, sector, cfg)
    failures, findings, sols = [], [], []
    tols = [outcome.classify_tol(j, cfg.dedup_tol) for j in range(len(outcome.solutions))]
    classes = [classify(spec, sector, rs, tol) for rs, tol in zip(outcome.solutions, tols)]
    for j, (rs, cls) in enumerate(zip(outcome.solutions, classes)):
        rec = {"roots": [_pair(r) for r in rs]}
        rec["residual_max"] = normalized_residual(spec, sector, rs)
        rec["uncertainty"] = outcome.radii[j]
        good = cls.admissible and cls.offdiagonal
        if "classify" in tasks:
            rec["classification"] = cls.to_dict()
            verdict = check_lemma(spec, sector, rs, residual_tol=cfg.newton_tol, tol=tols[j])
            rec["lemma"] = verdict.to_dict()
            if not verdict.passed:
                detail = verdict.to_dict()
                if spec.family is Family.XXZ and any(abs(r) <= tols[j] for r in rs):
                    # t_a = t_b = 0 satisfies t_a = q^2 t_b, so chains of
                    # inadmissible pairs need not end at a plus or minus point
                    detail["zero_root"] = True
                failures.append({"solution": j, "check": "lemma", "detail": detail})
        if "identities" in tasks:
            if good:
                rec["identities"] = _identity_records(spec, sector, rs, inst["identity_shifts"],
                                                      tol_identity)
                bad = [r["n"] for r in rec["identities"] if not r["passed"]]
                if bad:
                    failures.append({"solution": j, "check": "identities", "detail": {"n": bad}})
            else:
                rec["identities"] = "skipped: inadmissible or diagonal"
        if "sumrules" in tasks:
            if good:
                rec["sumrules"] = _sumrule_records(spec, sector, rs, inst["sumrule_ms"],
                                                   tol_sumrule)
                bad = [r for r in rec["sumrules"] if r.get("applicable") and not r["passed"]]
                if bad:
                    failures.append({"solution": j, "check": "sumrules",
                                     "detail": {"m": [r.get("m", r.get("rule")) for r in bad]}})
            else:
                rec["sumrules"] = "skipped: inadmissible or diagonal"
        sols.append(rec)
    section = {
        "label": inst.get("label"),
        "model": spec.to_dict(),
        "sector": {"k": sector.k, "two_sz": sector.two_sz},
        "solver": {"newton_max_iter": cfg.newton_max_iter, "newton_tol": cfg.newton_tol,
                   "dedup_tol": cfg.dedup_tol, "max_starts": cfg.starts,
                   "rng_seed": cfg.rng_seed, "expected_count": cfg.expected_count},
        "solve": {"n_solutions": len(outcome.solutions), "starts_used": outcome.starts_used,
                  "under_found": outcome.under_found, "residual_max": outcome.residual_max},
        "solutions": sols,
    }
    if "count" in tasks:
        count = completeness_report(spec, sector, outcome, classes)
        section["count"] = count.to_dict()
        if not count.match:
            msg = {"check": "count", "detail": count.to_dict()}
            if count.conjectural:
                findings.append("count differs from the conjectural expectation: "
                                f"expected {count.expected}, "
                                f"found {count.found_admissible_offdiagonal}")
            else:
                failures.append(msg)
    section["findings"] = findings
    section["failures"] = failures
    section["passed"] = not failures
    return section


def _threads():
    raw = os.environ.get("BETHEKIT_THREADS")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run(doc, tasks=None, command="run", tol_identity=DEFAULT_TOL_IDENTITY,
        tol_sumrule=DEFAULT_TOL_SUMRULE):
    """Validate and run a config document; returns the report as a dict.

    ``tasks`` overrides the per-instance task lists.  Instances run on up to
    ``BETHEKIT_THREADS`` threads; the report is ordered by instance index.
    """
    instances = validate_config(doc)

    def one(inst):
        return run_instance(inst, tasks, tol_identity, tol_sumrule)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        sections = list(pool.map(one, instances))
    for i, s in enumerate(sections):
        s["index"] = i
    failures = [dict(f, instance=s["index"]) for s in sections for f in s["failures"]]
    return {
        "header": {
            "tool": "bethekit", "version": __version__, "command": command,
            "tasks": sorted(tasks) if tasks is not None else None,
            "tolerances": {"identity": tol_identity, "sumrule": tol_sumrule},
            "config": doc,
        },
        "instances": sections,
        "summary": {"passed": not failures, "n_instances": len(sections),
                    "failures": failures},
    }


def _finite(obj):
    if isinstance(obj, float):
        return obj if np.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj
