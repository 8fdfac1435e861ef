"""Command-line driver: parameter resolution, orchestration, canonical output.

Every run prints a single JSON document to stdout with the shape
{"manifest": ..., "result": ..., "checks": [{"name", "pass", "detail"}]}.
The manifest holds the command path and the fully resolved parameter set,
so `replay` can re-dispatch it and reproduce the output byte for byte;
for that reason wall time goes to stderr and the manifest slot for it is
always null.  Numbers serialize with 17 significant digits, complex values
as {"im", "re"}, object keys sorted.

Parameter precedence: explicit flags, then a key=value config file
('#' starts a comment), then built-in defaults.  The only environment
variable honored is IOMBENCH_OUTPUT_DIR, which relocates relative output
paths.  Exit codes: 0 pass, 1 comparison failure, 2 internal error,
64 usage, 65 malformed input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import __version__, bethe, elliptic, ilw, numerics, qseries, spectrum
from .partitions import enumerate_partitions

EXIT_OK = 0
EXIT_COMPARE = 1
EXIT_INTERNAL = 2
EXIT_USAGE = 64
EXIT_INPUT = 65

MAX_LEVEL = 8
OUTPUT_DIR_ENV = "IOMBENCH_OUTPUT_DIR"


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


# -- canonical JSON ---------------------------------------------------------------

def _format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return '"%s"' % repr(x)
    return format(float(x), ".17g")


def canonical_json(value) -> str:
    """Deterministic JSON: sorted keys, 17 significant digits, no whitespace."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        z = complex(value)
        return '{"im":%s,"re":%s}' % (_format_float(z.imag), _format_float(z.real))
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        items = sorted(value.items(), key=lambda kv: kv[0])
        return "{" + ",".join("%s:%s" % (json.dumps(k), canonical_json(v))
                              for k, v in items) + "}"
    if isinstance(value, np.ndarray):
        return canonical_json(list(value))
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in value) + "]"
    raise TypeError("cannot serialize %r" % type(value))


def _decode(value):
    """Undo the canonical encoding: {"re","im"} objects back to complex."""
    if isinstance(value, dict):
        if set(value.keys()) == {"re", "im"}:
            return complex(value["re"], value["im"])
        return {k: _decode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode(v) for v in value]
    return value


# -- converters for flag / config-file values ---------------------------------------

def _conv_int(raw):
    return int(raw) if isinstance(raw, str) else int(raw)


def _conv_float(raw):
    return float(raw)


def _conv_complex(raw):
    if isinstance(raw, str):
        return complex(raw.replace(" ", ""))
    return complex(raw)


def _conv_bool(raw):
    if isinstance(raw, bool):
        return raw
    text = str(raw).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError("not a boolean: %r" % raw)


def _conv_float_list(raw):
    if isinstance(raw, str):
        return [float(part) for part in raw.split(",") if part.strip()]
    return [float(v) for v in raw]


def _conv_json_file(raw):
    if not isinstance(raw, str):
        return raw
    try:
        with open(raw, "r", encoding="utf-8") as handle:
            return _decode(json.load(handle))
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (raw, exc))
    except json.JSONDecodeError as exc:
        raise InputError("malformed JSON in %s: %s" % (raw, exc))


def _coerce_complex(value, what: str) -> complex:
    try:
        return _conv_complex(value)
    except (TypeError, ValueError):
        raise InputError("field %s is not a complex number: %r" % (what, value))


def _coerce_complex_list(value, what: str):
    if not isinstance(value, (list, tuple)):
        raise InputError("field %s is not a list" % what)
    return tuple(_coerce_complex(v, what) for v in value)


# -- command registry ----------------------------------------------------------------

@dataclass(frozen=True)
class CommandSpec:
    path: tuple[str, ...]
    handler: Callable[[dict], tuple[dict, list, dict]]
    defaults: dict
    converters: dict


COMMANDS: dict[tuple[str, ...], CommandSpec] = {}


def _register(path, handler, defaults, converters):
    COMMANDS[path] = CommandSpec(path, handler, defaults, converters)


def _check(name: str, passed: bool, detail: str = "") -> dict:
    return {"name": name, "pass": bool(passed), "detail": detail}


def _require_level(level: int) -> int:
    level = int(level)
    if level < 0 or level > MAX_LEVEL:
        raise UsageError("level must be in 0..%d" % MAX_LEVEL)
    return level


def _ilw_level_dimension(level: int) -> int:
    return sum(len(enumerate_partitions(k)) * len(enumerate_partitions(level - k))
               for k in range(level + 1))


def _ilw_shifts(pihat: float) -> tuple[complex, complex]:
    # shifted weights fixed by sum = -1, difference = -pihat
    return ((-1.0 + pihat) / 2.0, (-1.0 - pihat) / 2.0)


def _solution_payload(sol: bethe.BetheSolution) -> dict:
    return {"groups": [list(grp) for grp in sol.groups],
            "residual": sol.residual_norm,
            "admissible": sol.admissible,
            "reason": sol.reason}


# -- handlers --------------------------------------------------------------------------

def _h_identities(params):
    degree = params["degree"]
    if degree < 1:
        raise UsageError("degree must be >= 1")
    checks = []
    rep = qseries.check_prop_A1(degree)
    checks.append(_check(rep.name, rep.passed, rep.detail))
    for a in range(1, 5):
        for b in range(1, 5):
            hp = qseries.hook_poincare(a, b, degree)
            detail = ""
            if not hp.agree:
                detail = "first difference %s" % (hp.brute.first_difference(hp.closed),)
            checks.append(_check("hook-poincare-%d-%d" % (a, b), hp.agree, detail))
    rep = qseries.check_one_variable_identity(degree, 4)
    checks.append(_check(rep.name, rep.passed, rep.detail))
    for ell in range(1, 5):
        rep = qseries.check_C_ell_factorization(ell, degree)
        checks.append(_check(rep.name, rep.passed, rep.detail))
    result = {"degree": degree,
              "identities": len(checks),
              "all_passed": all(c["pass"] for c in checks)}
    return result, checks, {}


def _ilw_params(params) -> ilw.IlwParams:
    return ilw.IlwParams(params["r"], params["tau"], params["pihat"])


def _h_ilw_spectrum(params):
    p = _ilw_params(params)
    level = _require_level(params["level"])
    spectra = []
    csv_rows = []
    for lvl in range(level + 1):
        values = [complex(z) for z in ilw.ilw_spectrum(p, lvl)]
        spectra.append({"level": lvl, "values": values})
        csv_rows.extend((lvl, idx, z) for idx, z in enumerate(values))
    result = {"r": params["r"], "tau": params["tau"], "pihat": params["pihat"],
              "beta": p.beta, "operator": "cubic", "spectra": spectra}
    return result, [], {"csv": csv_rows}


def _solve_ilw_level(p: ilw.IlwParams, lvl: int, stop_at_expected: bool):
    system = bethe.IlwSystem(p.r, p.tau, _ilw_shifts(p.pihat), lvl)
    expected = _ilw_level_dimension(lvl)
    options = bethe.SolveOptions(expected_count=expected if stop_at_expected else None)
    return system, bethe.solve_all(system, options), expected


def _h_ilw_bethe(params):
    p = _ilw_params(params)
    level = _require_level(params["level"])
    levels = []
    checks = []
    for lvl in range(level + 1):
        system, res, expected = _solve_ilw_level(p, lvl, True)
        sols = []
        for sol in res.solutions:
            payload = _solution_payload(sol)
            payload["eigenvalue"] = spectrum.ilw_eigenvalue_from_roots(
                sol.groups[0], p.beta)
            sols.append(payload)
        levels.append({"level": lvl, "expected_count": expected,
                       "found": res.count, "solutions": sols,
                       "rejected": [_solution_payload(s) for s in res.rejected]})
        checks.append(_check("count-level-%d" % lvl, res.count == expected,
                             "found %d of %d" % (res.count, expected)))
    result = {"r": params["r"], "tau": params["tau"], "pihat": params["pihat"],
              "shifts": list(_ilw_shifts(p.pihat)), "levels": levels}
    return result, checks, {}


def _h_ilw_crosscheck(params):
    p = _ilw_params(params)
    level = _require_level(params["level"])
    tol = params["tol"]
    table = []
    checks = []
    csv_rows = []
    for lvl in range(level + 1):
        op_values = [complex(z) for z in ilw.ilw_spectrum(p, lvl)]
        system, res, expected = _solve_ilw_level(p, lvl, True)
        bethe_values = [spectrum.ilw_eigenvalue_from_roots(sol.groups[0], p.beta)
                        for sol in res.solutions]
        counts_ok = len(bethe_values) == len(op_values)
        if counts_ok:
            dev = numerics.multiset_max_deviation(op_values, bethe_values)
            passed = dev <= tol
            detail = "count %d, max deviation %.3g" % (len(op_values), dev)
        else:
            dev = math.inf
            passed = False
            detail = "count mismatch: operator %d, bethe %d" % (
                len(op_values), len(bethe_values))
        table.append({"level": lvl, "operator_count": len(op_values),
                      "bethe_count": len(bethe_values),
                      "operator_values": op_values,
                      "bethe_values": sorted(bethe_values,
                                             key=lambda z: (z.real, z.imag)),
                      "max_deviation": dev})
        checks.append(_check("multiset-level-%d" % lvl, passed, detail))
        csv_rows.extend((lvl, idx, z) for idx, z in enumerate(op_values))
    result = {"r": params["r"], "tau": params["tau"], "pihat": params["pihat"],
              "tol": tol, "levels": table}
    return result, checks, {"csv": csv_rows}


def _elliptic_params(params) -> elliptic.EllipticParams:
    try:
        return elliptic.EllipticParams(params["q1"], params["q3"], params["pbar"],
                                       params["u1"], params["u2"])
    except ValueError as exc:
        raise UsageError(str(exc))


def _h_elliptic_i1(params):
    ep = _elliptic_params(params)
    level = _require_level(params["level"])
    tol = params["tol"]
    op = elliptic.build_elliptic_I1(ep, level)
    spectra = op.spectra()
    csv_rows = []
    table = []
    for lvl, values in enumerate(spectra):
        vals = [complex(z) for z in values]
        table.append({"level": lvl, "values": vals})
        csv_rows.extend((lvl, idx, z) for idx, z in enumerate(vals))
    result = {"p": ep.p, "q": ep.q, "spectra": table}
    checks = []
    if params["bethe"]:
        roots_by_level = {}
        for lvl in range(level + 1):
            system = bethe.ToroidalGl1System(ep.q1, ep.q3, ep.pbar,
                                             (ep.u1, ep.u2), lvl)
            expected = _ilw_level_dimension(lvl)
            res = bethe.solve_all(system,
                                  bethe.SolveOptions(expected_count=expected))
            roots_by_level[lvl] = [sol.groups[0] for sol in res.solutions]
        report = elliptic.elliptic_spectrum_vs_bethe(ep, level, roots_by_level)
        result["calibration"] = {"scale": report.scale, "offset": report.offset}
        for cmp in report.levels:
            ok = cmp.counts_match and cmp.max_deviation <= tol
            detail = ("operator %d vs bethe %d, max deviation %.3g"
                      % (cmp.operator_count, cmp.bethe_count, cmp.max_deviation))
            checks.append(_check("bethe-level-%d" % cmp.level, ok, detail))
    return result, checks, {"csv": csv_rows}


def _h_elliptic_limit(params):
    level = _require_level(params["level"])
    h_values = tuple(params["h"])
    if len(h_values) < 2:
        raise UsageError("need at least two h values")
    tol = params["tol"]
    report = elliptic.ilw_limit_check(params["r"], params["tau"], params["pihat"],
                                      h_values, level)
    table = [{"h": h, "max_residual": mr, "rms_residual": rr,
              "scale": sc, "offset": off}
             for h, mr, rr, sc, off in zip(report.h_values, report.max_residuals,
                                           report.rms_residuals, report.scales,
                                           report.offsets)]
    checks = []
    for idx, ratio in enumerate(report.ratios):
        checks.append(_check("ratio-%d" % idx, 8.0 <= ratio <= 32.0,
                             "residual ratio %.3g (nominal 16)" % ratio))
    final = report.max_residuals[-1]
    checks.append(_check("final-residual", final <= tol,
                         "max residual %.3g at h=%s" % (final, h_values[-1])))
    result = {"r": params["r"], "tau": params["tau"], "pihat": params["pihat"],
              "level": level, "table": table,
              "ratios": list(report.ratios)}
    return result, checks, {}


_SYSTEM_TAGS = ("toroidal-gl1", "toroidal-gl2", "ilw", "affine-gaudin",
                "ilw-gaudin-hybrid")


def _field(content: dict, name: str):
    if name not in content:
        raise InputError("missing field %r in system description" % name)
    return content[name]


def _system_from_dict(tag: str, content) -> bethe.BetheSystem:
    if not isinstance(content, dict):
        raise InputError("system description must be a JSON object")
    if tag == "toroidal-gl1":
        return bethe.ToroidalGl1System(
            _coerce_complex(_field(content, "q1"), "q1"),
            _coerce_complex(_field(content, "q3"), "q3"),
            _coerce_complex(_field(content, "pbar"), "pbar"),
            _coerce_complex_list(_field(content, "weights"), "weights"),
            int(_field(content, "n_roots")))
    if tag == "toroidal-gl2":
        return bethe.ToroidalGl2System(
            _coerce_complex(_field(content, "q1"), "q1"),
            _coerce_complex(_field(content, "q3"), "q3"),
            _coerce_complex(_field(content, "pbar"), "pbar"),
            _coerce_complex(_field(content, "pbar1"), "pbar1"),
            _coerce_complex_list(_field(content, "weights0"), "weights0"),
            _coerce_complex_list(_field(content, "weights1"), "weights1"),
            int(_field(content, "n0")), int(_field(content, "n1")))
    if tag == "ilw":
        shifts = _coerce_complex_list(_field(content, "shifts"), "shifts")
        if len(shifts) != 2:
            raise InputError("ilw system needs exactly two shifts")
        return bethe.IlwSystem(float(_field(content, "r")),
                               float(_field(content, "tau")),
                               (shifts[0], shifts[1]),
                               int(_field(content, "n_roots")))
    if tag == "affine-gaudin":
        return bethe.AffineGaudinSystem(
            float(_field(content, "r")), float(_field(content, "pihat")),
            _coerce_complex(_field(content, "v"), "v"),
            int(_field(content, "n0")), int(_field(content, "n1")))
    if tag == "ilw-gaudin-hybrid":
        return bethe.IlwGaudinHybridSystem(
            float(_field(content, "r")), float(_field(content, "pihat")),
            _coerce_complex(_field(content, "v"), "v"),
            float(_field(content, "tau")),
            int(_field(content, "n0")), int(_field(content, "n1")))
    raise UsageError("unknown system tag %r (expected one of %s)"
                     % (tag, ", ".join(_SYSTEM_TAGS)))


def _h_bethe_solve(params):
    tag = params["system"]
    if params["params"] is None:
        raise UsageError("--params FILE is required")
    system = _system_from_dict(tag, params["params"])
    expected = params["count_expected"]
    options = bethe.SolveOptions(tol=params["tol"])
    res = bethe.solve_all(system, options)
    result = {"system": tag, "dimension": system.dimension,
              "seeds_tried": res.seeds_tried,
              "solutions": [_solution_payload(s) for s in res.solutions],
              "rejected": [_solution_payload(s) for s in res.rejected]}
    checks = []
    if expected is not None:
        checks.append(_check("admissible-count", res.count == int(expected),
                             "found %d, expected %d" % (res.count, int(expected))))
    return result, checks, {}


def _h_gaudin_count(params):
    n = int(params["n"])
    if n < 1:
        raise UsageError("N must be >= 1")
    system = bethe.AffineGaudinSystem(params["r"], params["pihat"],
                                      params["v"], n, n)
    res = bethe.solve_all(system, bethe.SolveOptions(tol=params["tol"]))
    expected = len(enumerate_partitions(n))
    result = {"n": n, "found": res.count, "expected": expected,
              "status": "conjecture",
              "solutions": [_solution_payload(s) for s in res.solutions]}
    checks = [_check("gaudin-count", res.count == expected,
                     "conjecture-status: found %d admissible, expected "
                     "partition count %d" % (res.count, expected))]
    return result, checks, {}


def _h_oper_check(params):
    content = params["solution"]
    if content is None:
        raise UsageError("--solution FILE is required")
    if not isinstance(content, dict):
        raise InputError("solution description must be a JSON object")
    s_roots = _coerce_complex_list(_field(content, "s"), "s")
    t_roots = _coerce_complex_list(_field(content, "t"), "t")
    system = bethe.AffineGaudinSystem(float(_field(content, "r")),
                                      float(_field(content, "pihat")),
                                      _coerce_complex(_field(content, "v"), "v"),
                                      len(s_roots), len(t_roots))
    roots = np.asarray(s_roots + t_roots, dtype=complex)
    gamma_rep = spectrum.gaudin_gamma_check(system, roots)
    oper_rep = spectrum.oper_apparent_singularity_check(system, roots,
                                                        tol=params["tol_oper"])
    checks = [
        _check("gamma-consistency", gamma_rep.max_deviation <= params["tol_gamma"],
               "max deviation %.3g" % gamma_rep.max_deviation),
        _check("oper-apparent-singularities", oper_rep.passed,
               "max obstruction %.3g" % oper_rep.max_obstruction),
    ]
    result = {"gammas": list(gamma_rep.gammas),
              "gamma_deviation": gamma_rep.max_deviation,
              "obstructions": list(oper_rep.obstructions),
              "max_obstruction": oper_rep.max_obstruction,
              "exponents_at_roots": list(oper_rep.exponent_pair)}
    if len(s_roots) == len(t_roots) and s_roots:
        try:
            r1 = spectrum.r1_report(system, roots)
            result["r1"] = {"value": r1.value, "vacuum_factor": r1.vacuum_factor,
                            "momentum": r1.momentum, "conjectural": True,
                            "note": r1.note}
        except spectrum.GammaPoleError as exc:
            result["r1"] = {"error": str(exc)}
    return result, checks, {}


def _h_series_t(params):
    content = params["roots"]
    if content is None:
        raise UsageError("--roots FILE is required")
    if not isinstance(content, dict):
        raise InputError("roots description must be a JSON object")
    lmax = int(params["lmax"])
    if lmax < 0:
        raise UsageError("lmax must be >= 0")
    roots = _coerce_complex_list(content.get("roots", []), "roots")
    system = bethe.ToroidalGl1System(
        _coerce_complex(_field(content, "q1"), "q1"),
        _coerce_complex(_field(content, "q3"), "q3"),
        _coerce_complex(_field(content, "pbar"), "pbar"),
        _coerce_complex_list(_field(content, "weights"), "weights"),
        len(roots))
    try:
        direct = spectrum.t_series_direct(system, roots, lmax)
        coeff = spectrum.t_series_cor52(system, roots, lmax)
    except spectrum.SeriesDomainError as exc:
        raise UsageError(str(exc))
    dev = float(np.max(np.abs(direct - coeff)))
    checks = [_check("direct-vs-coefficient", dev <= params["tol"],
                     "max coefficient deviation %.3g" % dev)]
    result = {"lmax": lmax,
              "coefficients_direct": [complex(z) for z in direct],
              "coefficients_coefficient_route": [complex(z) for z in coeff],
              "max_deviation": dev}
    return result, checks, {}


# -- registry -----------------------------------------------------------------------

_register(("identities",), _h_identities,
          {"degree": 8}, {"degree": _conv_int})

_ILW_DEFAULTS = {"r": 2.5, "tau": -0.7, "pihat": 1.3, "level": 2, "tol": 1e-8}
_ILW_CONV = {"r": _conv_float, "tau": _conv_float, "pihat": _conv_float,
             "level": _conv_int, "tol": _conv_float}
_register(("ilw", "spectrum"), _h_ilw_spectrum, dict(_ILW_DEFAULTS), dict(_ILW_CONV))
_register(("ilw", "bethe"), _h_ilw_bethe, dict(_ILW_DEFAULTS), dict(_ILW_CONV))
_register(("ilw", "crosscheck"), _h_ilw_crosscheck, dict(_ILW_DEFAULTS), dict(_ILW_CONV))

_register(("elliptic", "i1"), _h_elliptic_i1,
          {"q1": 0.4 + 0.0j, "q3": 0.5 + 0.0j, "pbar": 0.05 + 0.0j,
           "u1": 1.0 + 0.0j, "u2": 1.3 + 0.0j, "level": 2, "tol": 1e-6,
           "bethe": False},
          {"q1": _conv_complex, "q3": _conv_complex, "pbar": _conv_complex,
           "u1": _conv_complex, "u2": _conv_complex, "level": _conv_int,
           "tol": _conv_float, "bethe": _conv_bool})
_register(("elliptic", "limit"), _h_elliptic_limit,
          {"r": 2.5, "tau": -0.7, "pihat": 1.3, "level": 1,
           "h": [0.05, 0.025], "tol": 1e-5},
          {"r": _conv_float, "tau": _conv_float, "pihat": _conv_float,
           "level": _conv_int, "h": _conv_float_list, "tol": _conv_float})

_register(("bethe", "solve"), _h_bethe_solve,
          {"system": "toroidal-gl1", "params": None, "count_expected": None,
           "tol": 1e-10},
          {"system": str, "params": _conv_json_file,
           "count_expected": _conv_int, "tol": _conv_float})

_register(("gaudin", "count"), _h_gaudin_count,
          {"n": 1, "r": 2.5, "pihat": 1.3, "v": 1.0 + 0.0j, "tol": 1e-10},
          {"n": _conv_int, "r": _conv_float, "pihat": _conv_float,
           "v": _conv_complex, "tol": _conv_float})

_register(("oper", "check"), _h_oper_check,
          {"solution": None, "tol_gamma": 1e-9, "tol_oper": 1e-8},
          {"solution": _conv_json_file, "tol_gamma": _conv_float,
           "tol_oper": _conv_float})

_register(("series", "t"), _h_series_t,
          {"roots": None, "lmax": 3, "tol": 1e-10},
          {"roots": _conv_json_file, "lmax": _conv_int, "tol": _conv_float})


# -- parsing and dispatch --------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        raise SystemExit(EXIT_USAGE)


def _flag_name(key: str) -> str:
    return "--" + key.replace("_", "-")


def build_parser() -> _Parser:
    parser = _Parser(prog="iombench",
                     description="integrals-of-motion workbench")
    sub = parser.add_subparsers(dest="_cmd", required=True, parser_class=_Parser)
    leaves = {}
    for path, spec in COMMANDS.items():
        if len(path) == 1:
            leaf = sub.add_parser(path[0])
            leaves[path] = leaf
        else:
            group_name = path[0]
            key = (group_name,)
            if key not in leaves:
                group = sub.add_parser(group_name)
                leaves[key] = group.add_subparsers(dest="_subcmd", required=True,
                                                   parser_class=_Parser)
            leaf = leaves[key].add_parser(path[1])
        leaf.set_defaults(_path=path)
        for name in spec.defaults:
            flags = [_flag_name(name)]
            if name == "n":
                flags.append("--N")
            if spec.converters.get(name) is _conv_bool:
                leaf.add_argument(*flags, action="store_true",
                                  default=argparse.SUPPRESS, dest=name)
            else:
                leaf.add_argument(*flags, type=str,
                                  default=argparse.SUPPRESS, dest=name)
        leaf.add_argument("--config", type=str, default=None)
        leaf.add_argument("--out", type=str, default=None)
        leaf.add_argument("--csv", type=str, default=None)
    replay = sub.add_parser("replay")
    replay.set_defaults(_path=("replay",))
    replay.add_argument("manifest", type=str)
    return parser


def _parse_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise InputError("cannot read config %s: %s" % (path, exc))
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise InputError("config line %d has no '=': %r" % (lineno, line))
        key, _, value = body.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve_params(spec: CommandSpec, given: dict, config: dict) -> dict:
    params = dict(spec.defaults)
    for key, raw in config.items():
        if key not in spec.defaults:
            raise InputError("unknown config key %r for command %s"
                             % (key, " ".join(spec.path)))
        try:
            params[key] = spec.converters[key](raw)
        except (TypeError, ValueError) as exc:
            raise InputError("bad config value for %s: %s" % (key, exc))
    for key, raw in given.items():
        try:
            params[key] = spec.converters[key](raw) if isinstance(raw, str) else raw
        except (TypeError, ValueError) as exc:
            raise UsageError("bad value for %s: %s" % (_flag_name(key), exc))
    return params


def _output_path(path: str) -> str:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _write_csv(path: str, rows) -> None:
    lines = ["level,index,re,im"]
    for level, index, value in rows:
        z = complex(value)
        lines.append("%d,%d,%s,%s" % (level, index,
                                      format(z.real, ".17g"),
                                      format(z.imag, ".17g")))
    with open(_output_path(path), "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def _run(spec: CommandSpec, params: dict, out: str | None, csv: str | None) -> int:
    result, checks, extras = spec.handler(params)
    manifest = {"command": list(spec.path), "params": params,
                "version": __version__, "wall_time": None}
    payload = {"manifest": manifest, "result": result, "checks": checks}
    text = canonical_json(payload) + "\n"
    sys.stdout.write(text)
    if out:
        with open(_output_path(out), "w", encoding="utf-8") as handle:
            handle.write(text)
    if csv is not None:
        rows = extras.get("csv")
        if rows is None:
            raise UsageError("this command has no CSV export")
        _write_csv(csv, rows)
    return EXIT_OK if all(c["pass"] for c in checks) else EXIT_COMPARE


def _run_replay(manifest_path: str) -> int:
    content = _conv_json_file(manifest_path)
    if isinstance(content, dict) and "manifest" in content:
        content = content["manifest"]
    if not isinstance(content, dict) or "command" not in content or "params" not in content:
        raise InputError("not a run manifest: %s" % manifest_path)
    path = tuple(content["command"])
    spec = COMMANDS.get(path)
    if spec is None:
        raise InputError("manifest names unknown command %r" % (list(path),))
    params = content["params"]
    if not isinstance(params, dict):
        raise InputError("manifest params must be an object")
    unknown = set(params) - set(spec.defaults)
    if unknown:
        raise InputError("manifest has unknown params %s" % sorted(unknown))
    merged = dict(spec.defaults)
    merged.update(_decode(params))
    return _run(spec, merged, None, None)


def main(argv=None) -> int:
    args = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        namespace = parser.parse_args(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        path = namespace._path
        if path == ("replay",):
            return _run_replay(namespace.manifest)
        spec = COMMANDS[path]
        config = _parse_config(namespace.config) if namespace.config else {}
        given = {k: v for k, v in vars(namespace).items()
                 if k in spec.defaults}
        params = _resolve_params(spec, given, config)
        return _run(spec, params, namespace.out, namespace.csv)
    except UsageError as exc:
        sys.stderr.write("usage error: %s\n" % exc)
        return EXIT_USAGE
    except InputError as exc:
        sys.stderr.write("input error: %s\n" % exc)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - deliberate catch-all at the boundary
        sys.stderr.write("internal error: %r\n" % exc)
        return EXIT_INTERNAL
    finally:
        sys.stderr.write("wall time %.3f s\n" % (time.perf_counter() - start))


if __name__ == "__main__":
    sys.exit(main())
