"""Command-line front end: build artifacts, run verification suites, report
code parameters.

Configs are versioned JSON ("schema": 1).  Exit codes: 0 all selected
checks pass, 1 a check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import ccz as cczmod
from . import complexes as cx
from . import cup as cupmod
from .chain import ChainComplex, CSSCode, distance_bounds, to_alist
from .duality import verify_exactness, verify_poincare, verify_section_duality
from .gf import FieldSpec
from .localcode import LinCode, named_code
from .sheaf import (
    LocalCodeAssignment,
    Sheaf,
    cubical_tensor_sheaf,
    dual_sheaf,
    is_locally_acyclic,
    sheaf_from_local_codes,
    uniform_assignment,
    verify_axioms,
)

SUITES = ("dd-zero", "axioms", "acyclic", "poincare", "leibniz", "ccz", "all")


class ConfigError(Exception):
    pass


def load_config(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    cfg = json.loads(p.read_text())
    if cfg.get("schema") != 1:
        raise ConfigError(f"unsupported config schema: {cfg.get('schema')!r}")
    return cfg


def build_field(cfg: dict) -> FieldSpec:
    f = cfg.get("field", {"r": 1})
    return FieldSpec(int(f["r"]), int(f["modulus"])) if "modulus" in f else FieldSpec(int(f["r"]))


_BUILTIN_SIMPLICIAL = {
    "torus7": cx.torus_triangulation,
    "rp3": cx.projective_space_3,
    "tetrahedron": lambda: cx.simplex_boundary(4),
}


def build_complex(cfg: dict) -> cx.CellComplex:
    c = cfg.get("complex")
    if not c:
        raise ConfigError("config has no 'complex' section")
    kind = c.get("kind")
    if kind == "cubical":
        n, t = int(c["N"]), int(c["t"])
        if "shifts" in c:
            spec = cx.cyclic_spec(n, t, c["shifts"])
        elif "permutations" in c:
            spec = cx.CubicalSpec(n, t, c["permutations"])
        else:
            raise ConfigError("cubical complex needs 'shifts' or 'permutations'")
        return cx.build_cubical(spec)
    if kind == "simplicial":
        if "builtin" in c:
            name = c["builtin"]
            if name not in _BUILTIN_SIMPLICIAL:
                raise ConfigError(f"unknown builtin complex {name!r}")
            return _BUILTIN_SIMPLICIAL[name]()
        if "facets" in c:
            return cx.build_simplicial(c["facets"])
        raise ConfigError("simplicial complex needs 'facets' or 'builtin'")
    raise ConfigError(f"unknown complex kind {kind!r}")


def build_sheaf(x: cx.CellComplex, fs: FieldSpec, code_cfg: dict) -> Sheaf:
    if "directions" in code_cfg:
        delta = x.spec.delta
        codes = [named_code(fs, name, delta) for name in code_cfg["directions"]]
        return cubical_tensor_sheaf(x, codes)
    if "uniform" in code_cfg:
        widths = {len(x.up_set(x.t - 1, i, x.t)) for i in range(x.n_cells(x.t - 1))}
        if len(widths) != 1:
            raise ConfigError("uniform code on a complex with mixed local lengths")
        code = named_code(fs, code_cfg["uniform"], widths.pop())
        return sheaf_from_local_codes(x, uniform_assignment(x, code))
    if "generator" in code_cfg:
        gen = np.asarray(code_cfg["generator"], dtype=np.int64)
        code = LinCode(fs, gen.shape[1], gen)
        return sheaf_from_local_codes(x, uniform_assignment(x, code))
    if "per_cell" in code_cfg:
        assign = {}
        for key, gen in code_cfg["per_cell"].items():
            gen = np.asarray(gen, dtype=np.int64)
            assign[int(key)] = LinCode(fs, gen.shape[1], gen)
        return sheaf_from_local_codes(x, LocalCodeAssignment(assign))
    raise ConfigError(
        "code entry needs one of 'directions', 'uniform', 'generator', 'per_cell'"
    )


def _legs_config(cfg: dict) -> list[dict]:
    codes = cfg.get("codes")
    if not codes:
        raise ConfigError("config has no 'codes' section")
    if len(codes) == 1:
        return [codes[0]] * 3
    if len(codes) != 3:
        raise ConfigError("'codes' must have 1 or 3 entries")
    return codes


def _levels(cfg: dict, x) -> list[int]:
    lv = cfg.get("levels", [1] * 3)
    if len(lv) == 1:
        lv = lv * 3
    if len(lv) != 3:
        raise ConfigError("'levels' must have 1 or 3 entries")
    return [int(v) for v in lv]


def _write_json(path: Path, payload: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_build(cfg: dict, out: Path) -> int:
    fs = build_field(cfg)
    x = build_complex(cfg)
    sheaf = build_sheaf(x, fs, _legs_config(cfg)[0])
    cplx = ChainComplex(sheaf)
    level = _levels(cfg, x)[0]
    summary = {
        "cells": x.counts(),
        "cochain_dims": cplx.dims,
        "euler": cplx.euler_characteristic(),
    }
    if 1 <= level <= x.t - 1:
        code = CSSCode(cplx, level)
        summary.update({"n": code.n, "k": code.k, "level": level})
        _write_json(out / "css.json", code.metadata())
        (out / "hx.alist").write_text(to_alist(code.hx))
        (out / "hz.alist").write_text(to_alist(code.hz))
    _write_json(out / "complex.json", x.to_json())
    _write_json(out / "sheaf.json", sheaf.to_json())
    _write_json(out / "summary.json", summary)
    print(json.dumps(summary, sort_keys=True))
    return 0


def _suite_dd_zero(cfg, fs, x, legs, levels, seed, trials):
    out = {}
    for i, sheaf in enumerate(legs):
        cplx = ChainComplex(sheaf)  # raises on a nonzero square
        out[f"leg{i}"] = all(
            (cplx.delta[d + 1] @ cplx.delta[d]).is_zero() for d in range(x.t - 1)
        )
    return out


def _suite_axioms(cfg, fs, x, legs, levels, seed, trials):
    return {f"leg{i}": verify_axioms(s).to_json() for i, s in enumerate(legs)}


def _suite_acyclic(cfg, fs, x, legs, levels, seed, trials):
    return {f"leg{i}": is_locally_acyclic(s).to_json() for i, s in enumerate(legs)}


def _suite_poincare(cfg, fs, x, legs, levels, seed, trials):
    out = {}
    for i, sheaf in enumerate(legs):
        cplx = ChainComplex(sheaf)
        dual_cplx = ChainComplex(dual_sheaf(sheaf))
        out[f"leg{i}"] = {
            "sections": verify_section_duality(cplx, dual_cplx).to_json(),
            "poincare": verify_poincare(cplx, dual_cplx).to_json(),
            "exactness": verify_exactness(cplx, dual_cplx).to_json(),
        }
    return out


def _suite_leibniz(cfg, fs, x, legs, levels, seed, trials):
    if x.kind != "simplicial":
        raise ConfigError("the leibniz suite needs a simplicial complex")
    c1 = ChainComplex(legs[0])
    c2 = ChainComplex(legs[1])
    prod = cupmod.product_complex(c1, c2)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    failures = []
    for trial in range(trials):
        i = int(rng.integers(0, x.t + 1))
        j = int(rng.integers(0, x.t + 1 - i))
        a = cupmod.Cochain.random(c1, i, rng)
        b = cupmod.Cochain.random(c2, j, rng)
        rep = cupmod.leibniz_check(a, b, prod)
        if not rep.ok:
            failures.append({"trial": trial, "degrees": [i, j], "witness": str(rep.witness_cell)})
    return {"trials": trials, "seed": seed, "failures": failures, "ok": not failures}


def _build_ccz_code(cfg, fs, x, legs, levels):
    cplxs = [ChainComplex(s) for s in legs]
    if x.kind == "cubical" and x.t == 3:
        if levels != [1, 1, 1]:
            raise ConfigError("the explicit cubical form needs levels [1, 1, 1]")
        form = cczmod.cube_form(*cplxs)
    elif x.kind == "simplicial":
        if sum(levels) != x.t:
            raise ConfigError(f"levels {levels} must sum to the dimension {x.t}")
        form = cczmod.cup_form(cplxs, levels)
    else:
        raise ConfigError("ccz suite needs a 3D cubical or a simplicial complex")
    code_legs = tuple(
        cczmod.CczLeg.from_complex(c, lv) for c, lv in zip(cplxs, levels)
    )
    return cczmod.CCZCode(code_legs, form)


def _suite_ccz(cfg, fs, x, legs, levels, seed, trials):
    code = _build_ccz_code(cfg, fs, x, legs, levels)
    rep = cczmod.certify_ccz(code, trials=trials, seed=seed)
    out = rep.to_json()
    out["product_condition"] = cczmod.product_condition_status(code)
    return out


_SUITE_FN = {
    "dd-zero": _suite_dd_zero,
    "axioms": _suite_axioms,
    "acyclic": _suite_acyclic,
    "poincare": _suite_poincare,
    "leibniz": _suite_leibniz,
    "ccz": _suite_ccz,
}


def _report_ok(value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, dict):
        if "ok" in value:
            return bool(value["ok"])
        return all(_report_ok(v) for v in value.values())
    return True


def cmd_verify(cfg: dict, suite: str, out: Path, seed: int, trials: int) -> int:
    fs = build_field(cfg)
    x = build_complex(cfg)
    leg_cfgs = _legs_config(cfg)
    legs = [build_sheaf(x, fs, c) for c in leg_cfgs]
    levels = _levels(cfg, x)
    if suite == "all":
        selected = ["dd-zero", "axioms", "acyclic", "poincare"]
        if x.kind == "simplicial":
            selected.append("leibniz")
        if (x.kind == "cubical" and x.t == 3) or (x.kind == "simplicial" and sum(levels) == x.t):
            selected.append("ccz")
    else:
        selected = [suite]
    report = {"suite": suite, "seed": seed, "trials": trials, "checks": {}}
    for name in selected:
        report["checks"][name] = _SUITE_FN[name](cfg, fs, x, legs, levels, seed, trials)
    ok = _report_ok(report["checks"])
    report["ok"] = ok
    path = out / f"verify_{suite}.json"
    _write_json(path, report)
    print(json.dumps({"suite": suite, "ok": ok, "report": str(path)}, sort_keys=True))
    return 0 if ok else 1


def cmd_params(cfg: dict, out: Path, seed: int, trials: int) -> int:
    fs = build_field(cfg)
    x = build_complex(cfg)
    leg_cfgs = _legs_config(cfg)
    legs = [build_sheaf(x, fs, c) for c in leg_cfgs]
    levels = _levels(cfg, x)
    caps = cfg.get("caps", {})
    cplx = ChainComplex(legs[0])
    result: dict = {"seed": seed, "trials": trials}
    level = levels[0]
    if 1 <= level <= x.t - 1:
        code = CSSCode(cplx, level)
        result["n"] = {"value": code.n, "provenance": "exact"}
        result["k"] = {"value": code.k, "provenance": "exact"}
        dist = distance_bounds(
            code,
            exhaustive_cap=int(caps.get("exhaustive_distance", 1 << 22)),
            trials=trials,
            seed=seed,
        )
        dj = dist.to_json()
        result["d_exact"] = {
            "value": dj["d_exact"],
            "provenance": "exact" if dist.d_exact is not None else "not computed",
        }
        result["d_upper"] = {
            "value": dj["d_upper"],
            "provenance": "exact" if dist.d_exact is not None else "bound",
            "side": dj["side"],
        }
    else:
        result["n"] = {"value": cplx.dims[level], "provenance": "exact"}
        result["k"] = {"value": cplx.cohomology(level)[0], "provenance": "exact"}
    try:
        code3 = _build_ccz_code(cfg, fs, x, legs, levels)
    except ConfigError:
        code3 = None
    if code3 is not None:
        rep = cczmod.certify_ccz(code3, trials=trials, seed=seed)
        certified = rep.ok
        tag = "exact" if certified else "uncertified"
        result["n_ccz"] = {"value": code3.form.n_ccz, "provenance": tag}
        result["w_ccz"] = {"value": code3.form.w_ccz, "provenance": tag}
        out.mkdir(parents=True, exist_ok=True)
        (out / "gates.txt").write_text("\n".join(code3.form.gate_lines()) + "\n")
        tensor_cells = 1
        for leg in code3.legs:
            tensor_cells *= max(leg.k, 1)
        if not certified:
            result["k_ccz_lb"] = {"value": None, "provenance": "uncertified"}
            result["gamma_estimate"] = {"value": None, "provenance": "uncertified"}
        elif tensor_cells > int(caps.get("max_logical_tensor", 4096)):
            note = "not computed: logical tensor too large, raise caps.max_logical_tensor"
            result["k_ccz_lb"] = {"value": None, "provenance": note}
            result["gamma_estimate"] = {"value": None, "provenance": note}
        else:
            tensor = cczmod.build_logical_tensor(code3, recheck_shift_seed=seed)
            cert = cczmod.subrank_lower_bound(
                fs, tensor.tensor, restarts=int(caps.get("subrank_restarts", 64)), seed=seed
            )
            result["k_ccz_lb"] = {"value": cert.r, "provenance": "bound"}
            d_up = result.get("d_upper", {}).get("value")
            if cert.r > 0 and isinstance(d_up, int) and d_up > 1:
                gamma = float(np.log(code3.form.n_ccz / cert.r) / np.log(d_up))
                result["gamma_estimate"] = {"value": gamma, "provenance": "derived"}
            else:
                result["gamma_estimate"] = {"value": None, "provenance": "derived"}
    _write_json(out / "params.json", result)
    print(json.dumps(result, sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sheafccz",
        description="CSS sheaf codes on cell complexes: build, verify, report",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("build", "verify", "params"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default="artifacts")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--format", choices=("json",), default="json")
        if name == "verify":
            p.add_argument("--suite", choices=SUITES, default="all")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
        trials = args.trials if args.trials is not None else int(cfg.get("trials", 200))
        out = Path(args.out if args.out != "artifacts" else cfg.get("out", "artifacts"))
        if args.command == "build":
            return cmd_build(cfg, out)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite, out, seed, trials)
        return cmd_params(cfg, out, seed, trials)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
