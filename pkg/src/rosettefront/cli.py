"""Command-line front end: ``rosettefront {sample,singular,verify,conjecture}``.

Configuration is a YAML file; see README.md for the grammar.  Exit codes are
0 on success, 1 when a verification outcome contradicts its expectation and 2
for configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .equidistant import CssBranch, EquidistantBranch, branch_indices, css_indices, cusp_parity_ok
from .errors import (CuspSingularity, DegenerateSingularity, DegenerateZero, NotARosette, RosetteFrontError,
                     SwallowtailPoint)
from .invariants import (WidthFunction, alpha_plus, cusp_directional_torsion, cuspidal_curvature,
                         limiting_normal_curvature, singular_curvature)
from .quadrature import QuadratureConfig
from .rosette import Rosette
from .support import SupportFunction
from .verify import (BandLimitedSampler, GraphLoop, IdentityReport, builtin_width, explore_conjecture,
                     verify_css_integral, verify_cut_in_half, verify_gb_total, verify_homotopy_invariance,
                     verify_lambda_geodesic, verify_width_identity, wigner_cusps)
from .wavefront import FrontBranch, Kind

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
IDENTITIES = ("gb_total", "lambda_geodesic", "cut_in_half", "homotopy", "css_integral", "width")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    sf: SupportFunction | None
    ks: list
    lambdas: list
    quad: QuadratureConfig
    out: Path
    seed: int = 0
    n_theta: int = 1024
    n_lambda: int = 33
    identities: tuple = IDENTITIES
    widths: list = field(default_factory=list)
    expected_fail: list = field(default_factory=list)
    homotopy: dict | None = None
    tolerance: float | None = None
    trials: int = 1000
    max_freq: int = 12
    min_value: float = 0.1
    raw: dict = field(default_factory=dict)

    @property
    def digest(self) -> str:
        """SHA-256 of the canonical JSON form of the config; the output directory is excluded."""
        tree = {k: v for k, v in self.raw.items() if k != "out"}
        blob = json.dumps(tree, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()

    def rosette(self) -> Rosette:
        if self.sf is None:
            raise ConfigError("field 'rosette': required by this command")
        return Rosette(self.sf)


def _get(d: dict, path: str, kind, default=None):
    node = d
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            return default
        node = node[part]
    if node is None:
        return default
    try:
        if kind is list:
            if not isinstance(node, list):
                raise TypeError("expected a list")
            return node
        if kind is int and (isinstance(node, bool) or int(node) != node):
            raise TypeError("expected an integer")
        return kind(node)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{path}': {exc} (got {node!r})") from None


def load_config(path: str | None, args: argparse.Namespace | None = None) -> RunConfig:
    """Parse a YAML config file and apply command-line overrides."""
    raw: dict = {}
    if path:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        try:
            raw = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed YAML: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("top level of the config must be a mapping")
    if args is not None:
        for key, dest in (("seed", "seed"), ("n_samples", "quadrature.n_samples"),
                          ("tolerance", "verify.tolerance"), ("out", "out")):
            val = getattr(args, key, None)
            if val is not None:
                node = raw
                *parents, leaf = dest.split(".")
                for p in parents:
                    node = node.setdefault(p, {})
                node[leaf] = val

    sf = None
    if "rosette" in raw:
        m = _get(raw, "rosette.m", int, 1)
        a0 = _get(raw, "rosette.a0", float, None)
        if a0 is None:
            raise ConfigError("field 'rosette.a0': missing")
        terms = []
        for i, t in enumerate(_get(raw, "rosette.terms", list, [])):
            if not isinstance(t, (list, tuple)) or len(t) != 3:
                raise ConfigError(f"field 'rosette.terms[{i}]': expected [j, a_j, b_j], got {t!r}")
            try:
                j, a, b = int(t[0]), float(t[1]), float(t[2])
            except (TypeError, ValueError):
                raise ConfigError(f"field 'rosette.terms[{i}]': non-numeric entry {t!r}") from None
            if j < 1 or j != t[0]:
                raise ConfigError(f"field 'rosette.terms[{i}]': harmonic index must be a positive integer")
            terms.append((j, a, b))
        try:
            sf = SupportFunction(m, a0, tuple(terms))
        except ValueError as exc:
            raise ConfigError(f"field 'rosette.m': {exc}") from None
        check = sf.is_rosette()
        if not check:
            raise ConfigError(str(NotARosette(check.theta_min, check.rho_min)))

    m = sf.m if sf else 1
    ks = [int(k) for k in _get(raw, "branches.k", list, [k for k in range(1, m + 1, 2)])]
    for k in ks:
        if k % 2 == 0 or not 1 <= k <= m:
            raise ConfigError(f"field 'branches.k': {k} is not an odd index in 1..{m}")
    lambdas = [float(x) for x in _get(raw, "branches.lambdas", list, [round(0.1 * i, 12) for i in range(10)])]
    if any(not 0.0 <= x <= 1.0 for x in lambdas):
        raise ConfigError("field 'branches.lambdas': values must lie in [0, 1]")
    try:
        quad = QuadratureConfig(
            n_samples=_get(raw, "quadrature.n_samples", int, 2**14),
            guard_halfwidth=_get(raw, "quadrature.guard_halfwidth", float, 1e-4),
            richardson_levels=_get(raw, "quadrature.richardson_levels", int, 3),
            tolerance=_get(raw, "quadrature.tolerance", float, 1e-10),
        )
    except ValueError as exc:
        raise ConfigError(f"field 'quadrature': {exc}") from None
    identities = tuple(_get(raw, "verify.identities", list, list(IDENTITIES)))
    unknown = set(identities) - set(IDENTITIES)
    if unknown:
        raise ConfigError(f"field 'verify.identities': unknown {sorted(unknown)}")
    widths = _get(raw, "verify.widths", list, [])
    for i, w in enumerate(widths):
        if not isinstance(w, dict) or "name" not in w:
            raise ConfigError(f"field 'verify.widths[{i}]': expected a mapping with 'name'")
        try:
            builtin_width(w["name"])
        except KeyError as exc:
            raise ConfigError(f"field 'verify.widths[{i}].name': {exc}") from None
    homotopy = _get(raw, "verify.homotopy", dict, None)
    trials = _get(raw, "conjecture.trials", int, 1000)
    if trials < 0:
        raise ConfigError("field 'conjecture.trials': must be non-negative")
    return RunConfig(
        sf=sf, ks=ks, lambdas=lambdas, quad=quad,
        out=Path(_get(raw, "out", str, "out")),
        seed=_get(raw, "seed", int, 0),
        n_theta=_get(raw, "sample.n_theta", int, 1024),
        n_lambda=_get(raw, "sample.n_lambda", int, 33),
        identities=identities,
        widths=widths,
        expected_fail=[str(x) for x in _get(raw, "verify.expected_fail", list, [])],
        homotopy=homotopy,
        tolerance=_get(raw, "verify.tolerance", float, None),
        trials=trials,
        max_freq=_get(raw, "conjecture.max_freq", int, 12),
        min_value=_get(raw, "conjecture.min_value", float, 0.1),
        raw=raw,
    )


# -- output -----------------------------------------------------------------------

def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


def write_csv(path: Path, columns: list[str], rows, digest: str):
    """CSV with a ``# config_sha256=...`` line followed by the header row."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# config_sha256={digest}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_report(path: Path, tree: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        yaml.safe_dump(tree, fh, sort_keys=False, allow_unicode=True)


def print_table(rows: list[tuple], header: tuple, file=None):
    file = file or sys.stdout
    cells = [tuple(str(c) for c in header)] + [tuple(str(c) for c in r) for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for j, r in enumerate(cells):
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip(), file=file)
        if j == 0:
            print("  ".join("-" * w for w in widths), file=file)


# -- commands -------------------------------------------------------------------

def cmd_sample(cfg: RunConfig) -> int:
    r = cfg.rosette()
    out, h = cfg.out, cfg.digest
    theta = np.linspace(0.0, r.period, cfg.n_theta, endpoint=False)
    xy = r.point(theta)
    write_csv(out / "rosette.csv", ["theta", "x", "y", "kappa", "rho"],
              zip(theta, xy[:, 0], xy[:, 1], r.curvature(theta), r.rho(theta)), h)
    written = ["rosette.csv"]
    for lam in sorted(set(cfg.lambdas) | {0.5}):
        for k in branch_indices(r.m, lam):
            e = EquidistantBranch(r, lam, k)
            t = np.linspace(0.0, e.domain, cfg.n_theta, endpoint=False)
            p = e.point(t)
            name = f"equidistant_l{lam:g}_k{k}.csv"
            write_csv(out / name, ["theta", "x", "y"], zip(t, p[:, 0], p[:, 1]), h)
            written.append(name)
    for k in css_indices(r.m):
        c = CssBranch(r, k)
        t = np.linspace(0.0, c.domain, cfg.n_theta, endpoint=False)
        p = c.point(t)
        write_csv(out / f"css_k{k}.csv", ["theta", "x", "y"], zip(t, p[:, 0], p[:, 1]), h)
        written.append(f"css_k{k}.csv")
    for k in cfg.ks:
        b = FrontBranch(r, k)
        lam, t = np.meshgrid(np.linspace(0.0, 1.0, cfg.n_lambda), np.linspace(0.0, r.period, cfg.n_theta // 4,
                                                                                  endpoint=False), indexing="ij")
        lam, t = lam.ravel(), t.ravel()
        f, nu, dens = b.f(lam, t), b.normal(lam, t), b.signed_area_density(lam, t)
        write_csv(out / f"front_k{k}.csv",
                  ["lambda", "theta", "x0", "x1", "x2", "nu0", "nu1", "nu2", "area_density"],
                  (list(row) for row in np.column_stack([lam, t, f, nu, dens])), h)
        written.append(f"front_k{k}.csv")
    write_report(out / "sample_report.yaml", {"command": "sample", "config_sha256": h, "files": written})
    print_table([(w,) for w in written], ("file",))
    return EXIT_OK


def _edge_row(b: FrontBranch, theta: float, on_slice: bool):
    vals = []
    for fn in (singular_curvature, cuspidal_curvature, cusp_directional_torsion, limiting_normal_curvature):
        try:
            vals.append(float(fn(b, theta)))
        except (SwallowtailPoint, CuspSingularity):
            vals.append(float("nan"))
    alpha = float(alpha_plus(b, theta)) if on_slice else ""
    return [theta, float(b.singular_lambda(theta)), *vals, alpha]


def cmd_singular(cfg: RunConfig) -> int:
    r = cfg.rosette()
    out, h = cfg.out, cfg.digest
    census, coincide_rows, cusp_rows = {}, [], []
    table = []
    for lam in sorted(set(cfg.lambdas) | {0.5}):
        for k in branch_indices(r.m, lam):
            e = EquidistantBranch(r, lam, k)
            key = f"equidistant_l{lam:g}_k{k}"
            try:
                cusps = e.cusps()
            except DegenerateZero as exc:
                census[key] = {"status": "degenerate", "detail": str(exc)}
                table.append((key, "degenerate", "", ""))
                continue
            rot = e.rotation_number()
            ok = cusp_parity_ok(len(cusps), rot)
            census[key] = {"cusps": len(cusps), "rotation_number": rot, "parity_ok": ok}
            table.append((key, len(cusps), rot, "ok" if ok else "VIOLATED"))
            pts = e.point(np.array(cusps)) if cusps else np.zeros((0, 2))
            cusp_rows += [("equidistant", k, lam, t, p[0], p[1]) for t, p in zip(cusps, pts)]
    for k in css_indices(r.m):
        c = CssBranch(r, k)
        key = f"css_k{k}"
        try:
            cusps = c.cusps()
        except DegenerateZero as exc:
            census[key] = {"status": "degenerate", "detail": str(exc)}
            table.append((key, "degenerate", "", ""))
            continue
        rot = c.domain / (2 * np.pi)
        ok = cusp_parity_ok(len(cusps), rot)
        census[key] = {"cusps": len(cusps), "rotation_number": rot, "parity_ok": ok}
        table.append((key, len(cusps), rot, "ok" if ok else "VIOLATED"))
        pts = c.point(np.array(cusps)) if cusps else np.zeros((0, 2))
        cusp_rows += [("css", k, "", t, p[0], p[1]) for t, p in zip(cusps, pts)]
    write_csv(out / "cusps.csv", ["branch", "k", "lambda", "theta", "x", "y"], cusp_rows, h)

    for k in cfg.ks:
        b = FrontBranch(r, k)
        key = f"front_k{k}"
        try:
            points = b.singular_points(n=cfg.n_theta // 4)
        except (DegenerateZero, DegenerateSingularity) as exc:
            census[key] = {"status": "degenerate", "detail": str(exc)}
            table.append((key, "degenerate", "", ""))
            continue
        write_csv(out / f"singular_k{k}.csv", ["theta", "lambda", "kind", "x0", "x1", "x2", "css_x", "css_y"],
                  ((p.theta, p.lam, p.label, *p.location, *p.css_shadow) for p in points), h)
        sw = [p for p in points if p.kind is Kind.SWALLOWTAIL]
        css_c = CssBranch(r, k).cusps() if k in css_indices(r.m) else []
        css_all = np.mod(np.concatenate([css_c, np.add(css_c, k * np.pi)]), r.period) if css_c else np.array([])
        for p in sw:
            gap = float(np.min(np.abs(css_all - p.theta))) if len(css_all) else float("nan")
            coincide_rows.append((k, p.theta, p.label, gap))
        wc = wigner_cusps(b)
        edges = [p.theta for p in points
                 if p.kind is Kind.CUSPIDAL_EDGE and min((abs(p.theta - t) for t in wc), default=1.0) > 1e-9]
        rows = [_edge_row(b, t, False) for t in edges] + [_edge_row(b, t, True) for t in wc]
        write_csv(out / f"invariants_k{k}.csv",
                  ["theta", "lambda_k", "kappa_s", "kappa_c", "kappa_t", "kappa_nu", "alpha_plus_if_on_slice"],
                  sorted(rows, key=lambda row: row[0]), h)
        pos = sum(p.peak > 0 for p in sw)
        census[key] = {"swallowtails": len(sw), "positive_peaks": pos, "negative_peaks": len(sw) - pos,
                       "wigner_cusps": len(wc), "normal_note": b.notes[0]}
        table.append((key, len(sw), "", f"+{pos}/-{len(sw) - pos}"))
    write_csv(out / "swallowtail_css_coincidence.csv", ["k", "theta", "kind", "distance_to_css_cusp"],
              coincide_rows, h)
    write_report(out / "singular_report.yaml", {"command": "singular", "config_sha256": h, "census": census})
    print_table(table, ("branch", "cusps/swallowtails", "rotation", "parity/peaks"))
    return EXIT_OK


def _apply_tol(rep: IdentityReport, cfg: RunConfig) -> IdentityReport:
    if cfg.tolerance is not None:
        rep.tolerance = cfg.tolerance
    if rep.identity in cfg.expected_fail:
        rep.expected_fail = True
    return rep


def collect_reports(cfg: RunConfig) -> list[IdentityReport]:
    reps: list[IdentityReport] = []
    sel = set(cfg.identities)
    if cfg.sf is not None:
        r = cfg.rosette()
        for k in cfg.ks:
            b = FrontBranch(r, k)
            part: list[IdentityReport] = []
            if "gb_total" in sel:
                part.append(verify_gb_total(b, cfg.quad))
            skipped = bool(part and part[0].skipped)
            if not skipped:
                if "lambda_geodesic" in sel:
                    part += [verify_lambda_geodesic(b, lam, cfg.quad) for lam in cfg.lambdas]
                if "cut_in_half" in sel:
                    part += list(verify_cut_in_half(b, cfg.quad))
                if "css_integral" in sel:
                    part.append(verify_css_integral(b, cfg.quad))
                if "homotopy" in sel and cfg.homotopy:
                    plus = GraphLoop(*cfg.homotopy.get("plus", [0.99]))
                    minus = GraphLoop(*cfg.homotopy.get("minus", [0.01]))
                    part.append(verify_homotopy_invariance(b, plus, minus, cfg.quad))
                if "width" in sel:
                    part.append(verify_width_identity(WidthFunction(r, k), cfg=cfg.quad, name="width_identity"))
            for rep in part:
                rep.identity = f"k{k}.{rep.identity}"
            reps += part
    if "width" in sel:
        for entry in cfg.widths:
            w, period = builtin_width(entry["name"])
            rep = verify_width_identity(w, period, cfg.quad, name=f"width.{entry['name']}",
                                        expected_fail=bool(entry.get("expected_fail", False)))
            reps.append(rep)
    return sorted((_apply_tol(r, cfg) for r in reps), key=lambda r: r.identity)


def cmd_verify(cfg: RunConfig) -> int:
    reps = collect_reports(cfg)
    tree = {"command": "verify", "config_sha256": cfg.digest, "reports": [r.to_dict() for r in reps]}
    write_report(cfg.out / "verify_report.yaml", tree)
    print_table([(r.identity, r.status, f"{r.lhs:.12g}", f"{r.rhs:.12g}", f"{r.rel_residual:.2e}", f"{r.tolerance:g}")
                 for r in reps], ("identity", "status", "lhs", "rhs", "rel_residual", "tolerance"))
    return EXIT_OK if all(r.ok for r in reps) else EXIT_FAIL


def cmd_conjecture(cfg: RunConfig) -> int:
    sampler = BandLimitedSampler(cfg.seed, cfg.max_freq, cfg.min_value)
    threshold = cfg.tolerance if cfg.tolerance is not None else 1e-6
    summary = explore_conjecture(sampler, cfg.trials, cfg.quad, threshold=threshold)
    write_csv(cfg.out / "conjecture_residuals.csv", ["trial", "residual"], enumerate(summary.residuals), cfg.digest)
    tree = {"command": "conjecture", "config_sha256": cfg.digest, "threshold": threshold, **summary.to_dict()}
    write_report(cfg.out / "conjecture_report.yaml", tree)
    print_table([("trials", summary.trials), ("seed", summary.seed), ("max_residual", f"{summary.max_residual:.3e}"),
                 *((k, f"{v:.3e}") for k, v in summary.quantiles.items()),
                 ("counterexamples", len(summary.candidates))], ("quantity", "value"))
    return EXIT_OK


COMMANDS = {"sample": cmd_sample, "singular": cmd_singular, "verify": cmd_verify, "conjecture": cmd_conjecture}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rosettefront", description="Geometry and identity checks for rosette wave fronts.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="YAML configuration file")
    p.add_argument("--out", help="output directory (default: out)")
    p.add_argument("--seed", type=int, help="random seed for the conjecture sampler")
    p.add_argument("--n-samples", type=int, dest="n_samples", help="quadrature samples per period (power of two)")
    p.add_argument("--tolerance", type=float, help="override identity tolerances")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RosetteFrontError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
