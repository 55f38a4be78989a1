"""Command line: run scene files, list constructions, verify suites.

Usage::

    lagsurgery list-constructions
    lagsurgery verify KSigma2 --out-dir out
    lagsurgery run scene.json --out-dir out

A scene file is a JSON object::

    {
      "construction": "KSigma2",
      "params": {"eps1": 0.0067, "T": 4.0, "lambda": 0.05, "delta": "tuned",
                 "gamma": {"rho_min": 0.1, "rho_max_sq": 0.93, "area": 1.0},
                 "handle_angles": {"2": [1.047, 2.094]},
                 "grid": 64, "tolerance": 1e-6},
      "outputs": ["topology", "defect", "seam-trace", "monotonicity", "moment-image"]
    }

Unknown keys are rejected.  Exit status is 0 when every check passes, 1
when a check fails (including construction errors, which are reported as
failed checks) and 2 when the scene or the command line is invalid.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np

from .ambient import moment_map
from .catalog import (CONSTRUCTIONS, GammaCurve, build, chopped_polygon, chopped_polytope_margin,
                      polytope_violation)
from .errors import LagSurgeryError
from .invariants import monotonicity_report
from .surfaces import defect_convergence, lagrangian_defect, restrict_to_line

OUTPUTS = ("topology", "defect", "seam-trace", "monotonicity", "moment-image")

SCENE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["construction"],
    "properties": {
        "construction": {"enum": list(CONSTRUCTIONS)},
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "eps1": {"type": "number", "exclusiveMinimum": 0},
                "T": {"type": "number", "exclusiveMinimum": 0},
                "lambda": {"type": "number", "exclusiveMinimum": 0},
                "delta": {"oneOf": [{"type": "number", "minimum": 0}, {"const": "tuned"}]},
                "gamma": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "rho_min": {"type": "number", "exclusiveMinimum": 0},
                        "rho_max_sq": {"type": "number", "exclusiveMinimum": 0},
                        "area": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
                "handle_angles": {
                    "type": "object",
                    "patternProperties": {
                        r"^[0-2](,[0-1])?$": {"type": "array", "items": {"type": "number"},
                                             "minItems": 2, "maxItems": 2},
                    },
                    "additionalProperties": False,
                },
                "grid": {"type": "integer", "minimum": 8},
                "tolerance": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "outputs": {"type": "array", "items": {"enum": list(OUTPUTS)}, "uniqueItems": True},
    },
}

EXPECTED_TOPOLOGY = {
    "Clifford": (0, True), "ChekanovSchlenk": (0, True), "ModifiedChekanov": (0, True),
    "RealCP2": (1, False), "RealProduct": (0, True), "KSigma2": (-4, False),
    "KSigma4_seam": (-8, False), "KSigma4_delta": (-8, False), "ProductTorus41": (0, True),
    "ThetaSurg": (0, True),
}
EXPECTED_SEAMS = {"KSigma2": 1, "KSigma4_seam": 1, "KSigma4_delta": 2}
SURGERIES = ("KSigma2", "KSigma4_seam", "KSigma4_delta", "ProductTorus41", "ThetaSurg")
DEFAULT_DELTA = {"KSigma4_delta": "tuned", "ThetaSurg": "tuned"}


class SceneError(ValueError):
    """Invalid scene file or command line input."""


def load_scene(path) -> dict:
    try:
        scene = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SceneError(f"cannot read scene {path}: {exc}") from exc
    try:
        jsonschema.validate(scene, SCENE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SceneError(f"scene does not match the schema: {exc.message}") from exc
    return scene


def _build_kwargs(cid: str, params: dict) -> dict:
    kw = {}
    for key, name in (("eps1", "eps1"), ("T", "T"), ("lambda", "lam")):
        if key in params:
            kw[name] = params[key]
    if cid in DEFAULT_DELTA:
        kw["delta"] = params.get("delta", DEFAULT_DELTA[cid])
    elif "delta" in params:
        kw["delta"] = params["delta"]
    if "gamma" in params:
        kw["gamma"] = GammaCurve(**params["gamma"])
    if "handle_angles" in params:
        kw["handle_angles"] = {tuple(int(c) for c in k.split(",")): tuple(v)
                               for k, v in params["handle_angles"].items()}
    return kw


def _check(name, ok, value=None, detail=""):
    status = "INFO" if ok is None else ("PASS" if ok else "FAIL")
    return {"name": name, "status": status, "value": value, "detail": detail}


# ----------------------------------------------------------------------------
# suites


def check_topology(cid, atlas):
    m = atlas.mesh()
    chi, ori = m.euler_characteristic, m.orientable()
    exp = EXPECTED_TOPOLOGY[cid]
    return [
        _check("closed", m.is_closed(), int(len(m.boundary_edges)), "number of unglued mesh edges"),
        _check("euler_characteristic", chi == exp[0], chi, f"expected {exp[0]}"),
        _check("orientable", ori == exp[1], ori, f"expected {exp[1]}"),
    ]


def check_defect(cid, atlas, grid, tolerance):
    worst_a, worst_fd, ratios = 0.0, 0.0, []
    for p in atlas.patches:
        worst_a = max(worst_a, lagrangian_defect(p, (grid, grid)))
        worst_fd = max(worst_fd, lagrangian_defect(p, (grid, grid), use_analytic=False))
        r = defect_convergence(p, (32, 64, 128))["ratios"][-1]
        if r is not None:
            ratios.append(r)
    out = [
        _check("defect_analytic", worst_a <= 1e-9, worst_a, f"grid {grid}, bound 1e-9"),
        _check("defect_fd", worst_fd <= tolerance, worst_fd, f"grid {grid}, bound {tolerance:g}"),
    ]
    if ratios:
        lo, hi = min(ratios), max(ratios)
        out.append(_check("defect_fd_convergence", 3.5 <= lo and hi <= 4.5, [lo, hi],
                          "defect ratio 64 -> 128 with grid-tied steps, expected about 4"))
    return out


def check_seams(cid, atlas, out_dir):
    rows, checks = [], []
    for line in atlas.space.line_names:
        comps = restrict_to_line(atlas, line)
        for ci, pts in enumerate(comps):
            mx = moment_map(atlas.space, pts)
            for k, (x, y) in enumerate(mx):
                rows.append(f"{line},{ci},{k},{x:.17g},{y:.17g}")
        exp = EXPECTED_SEAMS.get(cid)
        checks.append(_check(f"seam_components_{line}", None if exp is None else len(comps) == exp,
                             len(comps), "" if exp is None else f"expected {exp}"))
    if out_dir is not None:
        (out_dir / f"seams_{cid}.csv").write_text("line,component,k,mx,my\n" + "\n".join(rows) + "\n")
    return checks


def check_monotonicity(cid, atlas):
    rows = monotonicity_report(atlas)
    out = []
    for r in rows:
        out.append({"name": f"monotonicity_{r['name']}", "status": r["status"],
                    "value": {"area": r["area"], "maslov": r["maslov"], "ratio": r["ratio"]},
                    "detail": "area / Maslov expected 0.5 within 2e-3"})
    if cid == "KSigma2" and len(rows) == 2:
        a, b = rows
        ok = b["maslov"] == 2 * a["maslov"] and abs(b["area"] - 2 * a["area"]) <= 2e-3
        out.append(_check("seam_twice_gamma", ok, [b["area"], b["maslov"]],
                          "seam loop area and Maslov index equal twice those of u"))
    return out


def sample_rows(atlas, grid=None):
    rows = []
    for k, p in enumerate(atlas.patches):
        U, V = p.grid_params(None if grid is None else (grid, grid))
        mx = moment_map(atlas.space, p.homogeneous(U, V))
        for u, v, (x, y) in zip(U.ravel(), V.ravel(), mx.reshape(-1, 2)):
            rows.append((k, float(u), float(v), float(x), float(y)))
    return rows


def write_csv(path, rows):
    lines = ["patch_id,u,v,mx,my"]
    lines += [f"{k},{u:.17g},{v:.17g},{x:.17g},{y:.17g}" for k, u, v, x, y in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def write_svg(path, atlas, rows, size: int = 400, pad: int = 20):
    A = atlas.space.line_area
    s = (size - 2 * pad) / A

    def px(x, y):
        return pad + s * x, size - pad - s * y

    def poly_path(P):
        pts = [px(*p) for p in P]
        return "M " + " L ".join(f"{a:.6f} {b:.6f}" for a, b in pts) + " Z"

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<path d="{poly_path(atlas.space.polytope_vertices)}" fill="none" stroke="black"/>']
    if atlas.label in SURGERIES:
        parts.append(f'<path d="{poly_path(chopped_polygon(atlas))}" fill="#dddddd" stroke="gray"/>')
    for _, _, _, x, y in rows:
        a, b = px(x, y)
        parts.append(f'<rect x="{a:.6f}" y="{b:.6f}" width="1" height="1" fill="blue"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


def check_moment_image(cid, atlas, out_dir, grid=None):
    rows = sample_rows(atlas, grid)
    if out_dir is not None:
        write_csv(out_dir / f"samples_{cid}.csv", rows)
        write_svg(out_dir / f"moment_{cid}.svg", atlas, rows)
    v = polytope_violation(atlas)
    out = [_check("moment_in_polytope", v <= 1e-9, v, "largest excursion outside the polytope")]
    if cid in SURGERIES:
        m = chopped_polytope_margin(atlas)
        out.append(_check("moment_in_chopped_polytope", m >= -1e-9, m,
                          "smallest margin to the cut lines"))
    return out


def run_suite(cid: str, params: dict | None = None, outputs=OUTPUTS, out_dir=None) -> dict:
    """Build a construction and run the requested checks.

    Returns
    -------
    dict
        The report: construction, params, checks and overall status.
    """
    params = dict(params or {})
    grid = int(params.get("grid", 64))
    tol = float(params.get("tolerance", 1e-6))
    out_dir = None if out_dir is None else Path(out_dir)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    checks = []
    try:
        atlas = build(cid, **_build_kwargs(cid, params))
        if "delta" in atlas.meta:
            checks.append(_check("delta", None, atlas.meta["delta"]))
        for o in OUTPUTS:
            if o not in outputs:
                continue
            if o == "topology":
                checks += check_topology(cid, atlas)
            elif o == "defect":
                checks += check_defect(cid, atlas, grid, tol)
            elif o == "seam-trace":
                checks += check_seams(cid, atlas, out_dir)
            elif o == "monotonicity":
                checks += check_monotonicity(cid, atlas)
            elif o == "moment-image":
                checks += check_moment_image(cid, atlas, out_dir)
    except LagSurgeryError as exc:
        checks.append({"name": "construction", "status": "FAIL", "value": type(exc).__name__,
                       "detail": str(exc)})
    status = "FAIL" if any(c["status"] == "FAIL" for c in checks) else "PASS"
    report = {"construction": cid, "params": params, "outputs": list(outputs), "checks": checks,
              "status": status}
    if out_dir is not None:
        (out_dir / f"report_{cid}.json").write_text(json.dumps(_plain(report), indent=2) + "\n")
    return report


def _plain(x):
    """Convert numpy scalars and tuples into JSON-friendly values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


# ----------------------------------------------------------------------------
# entry point


def _print_report(report):
    for c in report["checks"]:
        print(f"{c['status']:4s}  {c['name']}: {c['value']}")
    print(f"{report['construction']}: {report['status']}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="lagsurgery", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a scene file")
    p_run.add_argument("scene")
    sub.add_parser("list-constructions", help="list construction ids")
    p_ver = sub.add_parser("verify", help="run the default suite on one construction")
    p_ver.add_argument("construction")
    for p in (p_run, p_ver):
        p.add_argument("--out-dir", default="lagsurgery-out")
        p.add_argument("--grid", type=int, default=None, help="defect grid resolution N (N x N)")
        p.add_argument("--tolerance", type=float, default=None, help="finite-difference defect bound")
    args = parser.parse_args(argv)

    if args.command == "list-constructions":
        print("\n".join(CONSTRUCTIONS))
        return 0
    try:
        if args.command == "run":
            scene = load_scene(args.scene)
            cid = scene["construction"]
            params = dict(scene.get("params", {}))
            outputs = scene.get("outputs", list(OUTPUTS))
        else:
            if args.construction not in CONSTRUCTIONS:
                raise SceneError(f"unknown construction {args.construction!r}")
            cid, params, outputs = args.construction, {}, list(OUTPUTS)
        if args.grid is not None:
            if args.grid < 8:
                raise SceneError("--grid must be at least 8")
            params["grid"] = args.grid
        if args.tolerance is not None:
            if not args.tolerance > 0:
                raise SceneError("--tolerance must be positive")
            params["tolerance"] = args.tolerance
    except SceneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run_suite(cid, params, outputs, args.out_dir)
    _print_report(report)
    return 0 if report["status"] == "PASS" else 1


if __name__ == "__main__":
    sys.exit(main())
