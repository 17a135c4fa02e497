"""Batch command-line front end.

Commands: verlinde | index | kaehler | newstead | witten | oracle.
Configuration comes from an optional JSON file plus flag overrides; output
is a deterministic JSON document or a flat CSV coefficient table with the
fixed column schema

    command, group, level, genus, exponent, re, im,
    diag_residual, diag_int_defect

Exit codes: 0 ok, 2 configuration error, 3 computation error,
4 invariant-check failure.
"""

import argparse
import csv
import io
import json
import math
import sys

from . import roots, levels, indices, kaehler, witten, characters
from .deform import DeformationSpec
from .series import TruncatedSeries


class ConfigError(Exception):
    pass


class InvariantError(Exception):
    pass


def _build_parser():
    p = argparse.ArgumentParser(
        prog="bundleindex",
        description="Index formulas for moduli of G-bundles on a curve")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("verlinde", "index", "kaehler", "newstead", "witten",
                 "oracle"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None, help="JSON config file")
        sp.add_argument("--group", default=None,
                        help="A1|A2|A3|A4|C2|G2|T<rank>")
        sp.add_argument("--level", type=int, default=None)
        sp.add_argument("--level-matrix", default=None,
                        help="row-major comma-separated integer entries")
        sp.add_argument("--genus", type=int, default=None)
        sp.add_argument("--order", type=int, default=None)
        sp.add_argument("--t", type=float, default=None)
        sp.add_argument("--jobs", type=int, default=1,
                        help="parallelism bound (1 = serial)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", default=None)
    return p


_DEFAULTS = {
    "group": "A1", "level": 1, "genus": 2, "order": 3, "t": 0.0,
    "deformation": [], "insertion_weight": None, "odd_spec": None,
    "n_values": [100, 1000], "taylor": False, "s_order": 0,
}


def _load_config(args):
    cfg = dict(_DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"config: {e}")
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be an object")
        for k, v in data.items():
            if k not in cfg and k not in ("level_matrix",):
                raise ConfigError(f"config.{k}: unknown field")
            cfg[k] = v
    for flag in ("group", "level", "genus", "order", "t"):
        v = getattr(args, flag)
        if v is not None:
            cfg[flag] = v
    if args.level_matrix is not None:
        cfg["level_matrix"] = args.level_matrix
    cfg["command"] = args.command
    cfg["jobs"] = max(1, args.jobs)
    return cfg


def _resolve(cfg):
    try:
        rs = roots.parse_group(str(cfg["group"]))
    except (ValueError, IndexError) as e:
        raise ConfigError(f"config.group: {e}")
    lm = cfg.get("level_matrix")
    if lm is not None:
        if isinstance(lm, str):
            try:
                entries = [int(x) for x in lm.split(",")]
            except ValueError:
                raise ConfigError("config.level_matrix: non-integer entry")
            n = rs.rank
            if len(entries) != n * n:
                raise ConfigError(
                    f"config.level_matrix: expected {n*n} entries")
            h = [entries[i * n:(i + 1) * n] for i in range(n)]
        else:
            h = lm
        try:
            level = levels.Level.from_matrix(rs, h)
        except ValueError as e:
            raise ConfigError(f"config.level_matrix: {e}")
    else:
        try:
            level = levels.canonical_level(rs, int(cfg["level"]))
        except (ValueError, TypeError) as e:
            raise ConfigError(f"config.level: {e}")
    if not level.admissible():
        raise ConfigError("config.level: level is not admissible")
    genus = int(cfg["genus"])
    if genus < 0:
        raise ConfigError("config.genus: must be nonnegative")
    return rs, level, genus


def _character(rs, weight, where):
    try:
        return characters.irred_character(rs, tuple(int(x) for x in weight))
    except (ValueError, TypeError) as e:
        raise ConfigError(f"{where}: {e}")


def _deformation(rs, cfg):
    terms = []
    order = int(cfg["order"])
    for i, item in enumerate(cfg["deformation"]):
        if not isinstance(item, dict) or "highest_weight" not in item:
            raise ConfigError(f"config.deformation[{i}]: needs highest_weight")
        name = item.get("variable", f"t{i}")
        terms.append((name, _character(rs, item["highest_weight"],
                                       f"config.deformation[{i}]")))
    return DeformationSpec(tuple(terms), order)


def _insertion(rs, cfg):
    w = cfg.get("insertion_weight")
    if w is None:
        return None
    return _character(rs, w, "config.insertion_weight")


def _odd(rs, cfg):
    spec = cfg.get("odd_spec")
    if spec is None:
        return None
    try:
        factors = tuple(
            (f.get("cycle", f"C{i}"),
             _character(rs, f["weight"], f"config.odd_spec.factors[{i}]"))
            for i, f in enumerate(spec["factors"]))
        inter = tuple(tuple(int(x) for x in row)
                      for row in spec["intersections"])
        return indices.OddClassSpec(factors, inter)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"config.odd_spec: {e}")


def _series_rows(cfg, series, residual=0.0):
    """Flatten a TruncatedSeries into deterministic coefficient rows."""
    rows = []
    keys = sorted(series.coeffs, key=lambda k: (sum(k), k))
    zero = tuple([0] * series.nvars)
    if zero not in series.coeffs:
        keys = [zero] + keys
    for k in keys:
        v = series.coefficient(k)
        defect = None
        if series.nvars <= 1:
            n = sum(k)
            scaled = v.real * math.factorial(n)
            defect = abs(scaled - round(scaled)) + abs(v.imag)
        rows.append({
            "exponent": list(k), "re": v.real, "im": v.imag,
            "diag_residual": residual, "diag_int_defect": defect,
        })
    return rows


def _cmd_verlinde(cfg):
    rs, level, genus = _resolve(cfg)
    pts = levels.enumerate_F_rho(rs, level)
    value = levels.verlinde_number(rs, level, genus)
    defect = abs(value - round(value))
    if defect > 1e-6:
        raise InvariantError(
            f"verlinde number {value} is not an integer within 1e-6")
    oracle = None
    if (genus == 2 and rs.type_label == "A" and rs.rank <= 2
            and cfg.get("level_matrix") is None and 0 <= cfg["level"] <= 4):
        oracle = levels.fusion_gluing_oracle(rs, int(cfg["level"]))
        if oracle != round(value):
            raise InvariantError(
                f"formula value {value} disagrees with fusion oracle {oracle}")
    doc = {
        "command": "verlinde", "group": cfg["group"],
        "level": cfg.get("level"), "genus": genus,
        "value": round(value), "point_count": level.F_order,
        "regular_orbits": sum(1 for p in pts if p.is_regular),
        "diag_int_defect": defect,
    }
    if oracle is not None:
        doc["oracle_value"] = oracle
    rows = [{"exponent": [], "re": float(round(value)), "im": 0.0,
             "diag_residual": 0.0, "diag_int_defect": defect}]
    return doc, rows


def _cmd_index(cfg):
    rs, level, genus = _resolve(cfg)
    spec = _deformation(rs, cfg)
    U = _insertion(rs, cfg)
    odd = _odd(rs, cfg)
    series = indices.index_general(rs, level, genus, spec, U, odd)
    rows = _series_rows(cfg, series)
    for r in rows:
        if (spec.nvars == 1 and odd is None and r["diag_int_defect"] is not None
                and r["diag_int_defect"] > 1e-5):
            raise InvariantError(
                f"coefficient {r['exponent']} integrality defect "
                f"{r['diag_int_defect']}")
    doc = {
        "command": "index", "group": cfg["group"], "level": cfg.get("level"),
        "genus": genus, "variables": [n for n, _ in spec.terms],
        "order": spec.order, "coefficients": rows,
    }
    return doc, rows


def _cmd_kaehler(cfg):
    rs, level, genus = _resolve(cfg)
    if len(cfg["deformation"]) != 1:
        raise ConfigError(
            "config.deformation: kaehler needs exactly one character")
    V = _character(rs, cfg["deformation"][0]["highest_weight"],
                   "config.deformation[0]")
    U = _insertion(rs, cfg)
    t = float(cfg["t"])
    if not (-1 < t <= 0):
        raise ConfigError("config.t: must lie in (-1, 0]")
    if cfg.get("taylor"):
        series = kaehler.kaehler_index_taylor(rs, level, genus, V, U,
                                              int(cfg["order"]))
        rows = _series_rows(cfg, series)
        doc = {"command": "kaehler", "group": cfg["group"],
               "level": cfg.get("level"), "genus": genus, "mode": "taylor",
               "order": int(cfg["order"]), "coefficients": rows}
        return doc, rows
    s_order = int(cfg.get("s_order") or 0)
    state = kaehler.continue_points(rs, level, V, s_order, t)
    residual = max((tp.last_residual for tp in state.points), default=0.0)
    if residual > 1e-10:
        raise InvariantError(f"continuation residual {residual} above 1e-10")
    value = kaehler.kaehler_index(rs, level, genus, V, U, s_order, t,
                                  state=state)
    if isinstance(value, TruncatedSeries):
        rows = _series_rows(cfg, value, residual)
        coeffs = rows
    else:
        rows = [{"exponent": [], "re": value.real, "im": value.imag,
                 "diag_residual": residual, "diag_int_defect": None}]
        coeffs = rows
    doc = {"command": "kaehler", "group": cfg["group"],
           "level": cfg.get("level"), "genus": genus, "t": t,
           "s_order": s_order, "max_residual": residual,
           "hessian_guarantee": state.hessian_guarantee,
           "coefficients": coeffs}
    return doc, rows


def _cmd_newstead(cfg):
    rs, level, genus = _resolve(cfg)
    if len(cfg["deformation"]) != 1:
        raise ConfigError(
            "config.deformation: newstead needs exactly one character")
    V = _character(rs, cfg["deformation"][0]["highest_weight"],
                   "config.deformation[0]")
    U = _insertion(rs, cfg)
    report = kaehler.newstead_report(rs, level, genus, V, U)
    doc = {"command": "newstead", "group": cfg["group"],
           "level": cfg.get("level"), "genus": genus}
    rows = []
    for key in sorted(report):
        v = report[key]
        if isinstance(v, complex):
            v = {"re": v.real, "im": v.imag}
        doc[key] = v
        if isinstance(v, dict):
            rows.append({"exponent": [key], "re": v["re"], "im": v["im"],
                         "diag_residual": None, "diag_int_defect": None})
        elif isinstance(v, (int, float, bool)):
            rows.append({"exponent": [key], "re": float(v), "im": 0.0,
                         "diag_residual": None, "diag_int_defect": None})
    return doc, rows


def _cmd_witten(cfg):
    genus = int(cfg["genus"])
    l = int(cfg["level"])
    try:
        run = witten.asymptotic_check(l, genus, cfg["n_values"])
    except ValueError as e:
        raise ConfigError(f"witten: {e}")
    doc = {"command": "witten", "group": "A1", "level": l, "genus": genus,
           "d": run.d, "target": run.target,
           "results": [{"n": n, "scaled_level": lvl, "value": v,
                        "deviation": d}
                       for (n, lvl, v, d) in run.results]}
    devs = [d for (_, _, _, d) in run.results]
    if any(b > a + 1e-12 for a, b in zip(devs, devs[1:])):
        raise InvariantError("asymptotic deviations are not decreasing")
    rows = [{"exponent": [n], "re": v, "im": 0.0, "diag_residual": None,
             "diag_int_defect": d} for (n, _, v, d) in run.results]
    rows.append({"exponent": [], "re": run.target, "im": 0.0,
                 "diag_residual": None, "diag_int_defect": 0.0})
    return doc, rows


def _cmd_oracle(cfg):
    rs, level, genus = _resolve(cfg)
    if genus != 2:
        raise ConfigError("config.genus: oracle supports genus 2 only")
    try:
        value = levels.fusion_gluing_oracle(rs, int(cfg["level"]))
    except ValueError as e:
        raise ConfigError(f"oracle: {e}")
    doc = {"command": "oracle", "group": cfg["group"],
           "level": cfg.get("level"), "genus": genus, "value": value}
    rows = [{"exponent": [], "re": float(value), "im": 0.0,
             "diag_residual": 0.0, "diag_int_defect": 0.0}]
    return doc, rows


_COMMANDS = {
    "verlinde": _cmd_verlinde, "index": _cmd_index, "kaehler": _cmd_kaehler,
    "newstead": _cmd_newstead, "witten": _cmd_witten, "oracle": _cmd_oracle,
}


def _emit(cfg, args, doc, rows):
    if args.format == "json":
        text = json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["command", "group", "level", "genus", "exponent",
                    "re", "im", "diag_residual", "diag_int_defect"])
        for r in rows:
            w.writerow([
                cfg["command"], cfg["group"], cfg.get("level"), cfg["genus"],
                "(" + ",".join(str(x) for x in r["exponent"]) + ")",
                repr(float(r["re"])), repr(float(r["im"])),
                "" if r["diag_residual"] is None else repr(float(r["diag_residual"])),
                "" if r["diag_int_defect"] is None else repr(float(r["diag_int_defect"])),
            ])
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        doc, rows = _COMMANDS[args.command](cfg)
    except ConfigError as e:
        json.dump({"error": "config", "detail": str(e)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except InvariantError as e:
        json.dump({"error": "invariant", "detail": str(e)}, sys.stderr)
        sys.stderr.write("\n")
        return 4
    except Exception as e:  # computation failure
        json.dump({"error": "computation", "detail": f"{type(e).__name__}: {e}"},
                  sys.stderr)
        sys.stderr.write("\n")
        return 3
    _emit(cfg, args, doc, rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
