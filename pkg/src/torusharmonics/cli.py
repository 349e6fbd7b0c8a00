"""Command line front end: invariants, laplace, steklov, convergence.

Jobs are described by JSON configs in which every numeric quantity that
feeds the arithmetic is a decimal string (or integer), never a float, so
the file fixes the problem exactly at any precision.  Complex values are
[re, im] pairs of decimal strings.  Reports are printed to stdout and
written under --out as deterministic JSON (sorted keys, no timestamps);
field exports are CSV.  Exit codes: 0 success, 2 configuration error,
3 computation error.
"""

import argparse
import json
import os
import sys

import gmpy2

from .basis import BasisSpec, rows_at_sample
from .errors import ConfigError, TorusError
from .geometry import Domain, Hole, sample_boundary
from .laplace import BoundaryData, export_field, solve_laplace
from .lattice import lattice_invariants
from .linalg import DenseMatrix, condition_report, gram, matmul
from .precision import PrecisionContext, format_decimal, parse_decimal
from .steklov import SteklovConfig, export_eigenfunction, solve_steklov


# -- config parsing helpers ---------------------------------------------------

def _fail(path, message):
    raise ConfigError(f"{path}: {message}")


def _get(cfg, key, path, required=True, default=None):
    if key not in cfg:
        if required:
            _fail(path, f"missing key '{key}'")
        return default
    return cfg[key]


def _as_int(v, path, minimum=None):
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(path, "expected an integer")
    if minimum is not None and v < minimum:
        _fail(path, f"must be >= {minimum}")
    return v


def _as_bool(v, path):
    if not isinstance(v, bool):
        _fail(path, "expected true or false")
    return v


def _as_decimal(v, ctx, path):
    """Decimal string or int; floats are rejected to keep configs exact."""
    if isinstance(v, bool):
        _fail(path, "expected a decimal string")
    if isinstance(v, int):
        v = str(v)
    if not isinstance(v, str):
        _fail(path, "expected a decimal string (floats lose precision)")
    try:
        return parse_decimal(v, ctx)
    except TorusError as e:
        _fail(path, f"bad decimal literal: {e}")


def _as_complex(v, ctx, path):
    if not isinstance(v, list) or len(v) != 2:
        _fail(path, "expected [re, im] decimal strings")
    return ctx.complex(_as_decimal(v[0], ctx, path + "[0]"),
                       _as_decimal(v[1], ctx, path + "[1]"))


def _load_json(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}")
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _context_from(cfg, args):
    bits = args.bits if args.bits is not None else _get(cfg, "bits", "config")
    return PrecisionContext(_as_int(bits, "bits", minimum=64))


def _lattice_from(cfg, ctx):
    periods = _get(cfg, "periods", "config")
    if not isinstance(periods, list) or len(periods) != 2:
        _fail("periods", "expected two [re, im] pairs")
    p1 = _as_complex(periods[0], ctx, "periods[0]")
    p2 = _as_complex(periods[1], ctx, "periods[1]")
    half = ctx.real("0.5")
    return lattice_invariants(p1 * half, p2 * half, ctx)


def _holes_from(cfg, ctx):
    raw = _get(cfg, "holes", "config")
    if not isinstance(raw, list) or not raw:
        _fail("holes", "expected a non-empty list")
    holes = []
    for idx, h in enumerate(raw):
        path = f"holes[{idx}]"
        if not isinstance(h, dict):
            _fail(path, "expected an object")
        center = _as_complex(_get(h, "center", path), ctx, path + ".center")
        has_r = "radius" in h
        has_rho = "rho_cos" in h
        if has_r == has_rho:
            _fail(path, "give exactly one of 'radius' or 'rho_cos'")
        if has_r:
            holes.append(Hole(center,
                              radius=_as_decimal(h["radius"], ctx,
                                                 path + ".radius")))
        else:
            coeffs = h["rho_cos"]
            if not isinstance(coeffs, list) or not coeffs:
                _fail(path + ".rho_cos", "expected a non-empty list")
            cs = [_as_decimal(c, ctx, f"{path}.rho_cos[{i}]")
                  for i, c in enumerate(coeffs)]
            phase = _as_decimal(h.get("phase", "0"), ctx, path + ".phase")
            holes.append(Hole(center, rho_cos_coeffs=cs, phase=phase))
    return holes


def _domain_from(cfg, ctx):
    return Domain(_lattice_from(cfg, ctx), _holes_from(cfg, ctx))


def _boundary_data_from(cfg, ctx, n_holes):
    raw = _get(cfg, "data", "config")
    if not isinstance(raw, list) or len(raw) != n_holes:
        _fail("data", f"expected one entry per hole ({n_holes})")
    terms = []
    for idx, d in enumerate(raw):
        path = f"data[{idx}]"
        if not isinstance(d, dict):
            _fail(path, "expected an object")
        a0 = _as_decimal(d.get("a0", "0"), ctx, path + ".a0")
        modes = []
        for jdx, mode in enumerate(d.get("modes", [])):
            mpath = f"{path}.modes[{jdx}]"
            if not isinstance(mode, dict):
                _fail(mpath, "expected an object")
            k = _as_int(_get(mode, "k", mpath), mpath + ".k", minimum=1)
            ak = _as_decimal(mode.get("cos", "0"), ctx, mpath + ".cos")
            bk = _as_decimal(mode.get("sin", "0"), ctx, mpath + ".sin")
            modes.append((k, ak, bk))
        terms.append((a0, modes))
    return BoundaryData(ctx, terms)


# -- output helpers -----------------------------------------------------------

def _fmt(x, ctx):
    return format_decimal(x, ctx)


def _fmt_complex(z, ctx):
    return [format_decimal(z.real, ctx), format_decimal(z.imag, ctx)]


def _write_json(obj, path):
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(report, args, filename):
    out_dir = args.out
    os.makedirs(out_dir, exist_ok=True)
    _write_json(report, os.path.join(out_dir, filename))
    print(json.dumps(report, sort_keys=True, indent=2))


def _slot_names(spec):
    names = []
    for slot in spec.slots:
        kind = slot[0]
        if kind == "const":
            names.append("const")
        elif kind == "zh":
            names.append(f"zh{slot[1]}.{slot[2]}")
        elif kind == "wp":
            names.append(f"wp{slot[1]}[{slot[2]}].{slot[3]}")
        else:
            names.append(f"log{slot[1]}")
    return names


# -- subcommands --------------------------------------------------------------

def cmd_invariants(cfg, args):
    ctx = _context_from(cfg, args)
    lat = _lattice_from(cfg, ctx)
    report = {
        "bits": ctx.bits,
        "digits": ctx.digits,
        "omega1": _fmt_complex(lat.omega1, ctx),
        "omega2": _fmt_complex(lat.omega2, ctx),
        "tau": _fmt_complex(lat.tau, ctx),
        "g2": _fmt_complex(lat.g2, ctx),
        "g3": _fmt_complex(lat.g3, ctx),
        "eta1": _fmt_complex(lat.eta1, ctx),
        "eta2": _fmt_complex(lat.eta2, ctx),
        "gamma2": _fmt_complex(lat.gamma2, ctx),
        "area": _fmt(lat.area, ctx),
        "legendre_residual": _fmt(lat.legendre_residual(), ctx),
    }
    _emit(report, args, "invariants.json")
    return 0


def cmd_laplace(cfg, args):
    ctx = _context_from(cfg, args)
    domain = _domain_from(cfg, ctx)
    data = _boundary_data_from(cfg, ctx, len(domain.holes))
    k_max = args.kmax if args.kmax is not None else _get(cfg, "k_max", "config")
    k_max = _as_int(k_max, "k_max", minimum=0)
    oversample = _as_int(cfg.get("oversample", 3), "oversample", minimum=1)
    scaling = _as_bool(cfg.get("scaling", True), "scaling")
    normal_eq = _as_bool(cfg.get("normal_equations", False), "normal_equations")
    grid_n = args.grid if args.grid is not None else cfg.get("grid_n", 64)
    grid_n = _as_int(grid_n, "grid_n", minimum=1)

    sol = solve_laplace(domain, data, k_max, oversample=oversample,
                        scaling=scaling, normal_equations=normal_eq)
    os.makedirs(args.out, exist_ok=True)
    if _as_bool(cfg.get("export_field", True), "export_field"):
        export_field(sol, os.path.join(args.out, "laplace_field.csv"),
                     grid_n=grid_n)
    report = {
        "bits": ctx.bits,
        "k_max": k_max,
        "m": sol.spec.m,
        "samples": sol.samples_used,
        "boundary_sup_error": _fmt(sol.boundary_sup_error, ctx),
        "slots": _slot_names(sol.spec),
        "coefficients": [_fmt(v, ctx) for v in sol.coefficients.values],
    }
    _emit(report, args, "laplace_report.json")
    return 0


def _steklov_config_from(cfg, args):
    k_max = args.kmax if args.kmax is not None else _get(cfg, "k_max", "config")
    kw = {"k_max": _as_int(k_max, "k_max", minimum=0)}
    if "interior_points" in cfg:
        kw["interior_points"] = _as_int(cfg["interior_points"],
                                        "interior_points", minimum=1)
    if "seed" in cfg:
        kw["seed"] = _as_int(cfg["seed"], "seed")
    for key in ("sigma_lo", "sigma_hi", "delta_sigma", "tol_sigma"):
        if key in cfg:
            v = cfg[key]
            if isinstance(v, bool) or not isinstance(v, (str, int)):
                _fail(key, "expected a decimal string")
            kw[key] = str(v)
    if "oversample" in cfg:
        kw["oversample"] = _as_int(cfg["oversample"], "oversample", minimum=1)
    if "scaling" in cfg:
        kw["scaling"] = _as_bool(cfg["scaling"], "scaling")
    if "normal_equations" in cfg:
        kw["normal_equations"] = _as_bool(cfg["normal_equations"],
                                          "normal_equations")
    return SteklovConfig(**kw)


def _candidate_entry(cand, ctx):
    return {
        "sigma": _fmt(cand.sigma, ctx),
        "s_value": _fmt(cand.s_value, ctx),
        "residual_l2": _fmt(cand.residual_l2, ctx),
        "multiplicity": cand.multiplicity,
        "near_degenerate": cand.near_degenerate,
        "bracket": [_fmt(cand.bracket[0], ctx), _fmt(cand.bracket[1], ctx)],
    }


def cmd_steklov(cfg, args):
    ctx = _context_from(cfg, args)
    domain = _domain_from(cfg, ctx)
    scfg = _steklov_config_from(cfg, args)
    candidates = solve_steklov(domain, scfg)
    os.makedirs(args.out, exist_ok=True)
    if _as_bool(cfg.get("export_eigenfunctions", False),
                "export_eigenfunctions"):
        grid_n = args.grid if args.grid is not None else cfg.get("grid_n", 64)
        grid_n = _as_int(grid_n, "grid_n", minimum=1)
        for i, cand in enumerate(candidates, start=1):
            export_eigenfunction(
                cand, os.path.join(args.out, f"steklov_eigenfunction_{i}.csv"),
                grid_n=grid_n)
    spec_size = candidates[0].spec.m if candidates else BasisSpec(
        domain, scfg.k_max).m
    report = {
        "bits": ctx.bits,
        "k_max": scfg.k_max,
        "m": spec_size,
        "candidates": [_candidate_entry(c, ctx) for c in candidates],
    }
    _emit(report, args, "steklov_report.json")
    return 0


def _effective_cond(M):
    """Largest over smallest positive singular value of M.

    The normal-derivative matrix annihilates the constant slot exactly, so
    B^tA carries a structural zero singular value; the growth diagnostic is
    the conditioning of the complement.
    """
    svals = condition_report(M)[1]
    positive = [s for s in svals if s > 0]
    if not positive:
        return gmpy2.inf()
    return svals[0] / positive[-1]


def _condition_pair(domain, k_max, oversample, ctx):
    """Effective cond2 of B^tB and B^tA for the raw collocation matrices.

    B holds boundary-value rows, A normal-derivative rows, sampled exactly
    as the solvers sample.  Raw columns, no rescaling: the point of the
    diagnostic is the growth that motivates extended precision.
    """
    spec = BasisSpec(domain, k_max)
    S = max(oversample * spec.m, 8 * len(domain.holes))
    samples = sample_boundary(domain, S)
    with ctx.working():
        vrows = []
        nrows = []
        for s in samples:
            vrow, nrow = rows_at_sample(spec, s)
            vrows.append(vrow)
            nrows.append(nrow)
        B = DenseMatrix(vrows, ctx)
        A = DenseMatrix(nrows, ctx)
        cond_btb = _effective_cond(gram(B))
        cond_bta = _effective_cond(matmul(B.transpose(), A))
        return cond_btb, cond_bta


def _fmt_cond(x, ctx):
    return _fmt(x, ctx) if gmpy2.is_finite(x) else "inf"


def cmd_convergence(cfg, args):
    ctx = _context_from(cfg, args)
    kind = _get(cfg, "kind", "config")
    if kind not in ("laplace", "steklov"):
        _fail("kind", "expected 'laplace' or 'steklov'")
    k_values = _get(cfg, "k_values", "config")
    if (not isinstance(k_values, list) or not k_values
            or any(isinstance(k, bool) or not isinstance(k, int)
                   for k in k_values)):
        _fail("k_values", "expected a non-empty list of integers")
    want_cond = _as_bool(cfg.get("condition_columns", False),
                         "condition_columns")
    domain = _domain_from(cfg, ctx)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "convergence.csv")
    cond_header = ",cond_btb,cond_bta" if want_cond else ""

    def cond_cells(k, oversample):
        if not want_cond:
            return ""
        btb, bta = _condition_pair(domain, k, oversample, ctx)
        return f",{_fmt_cond(btb, ctx)},{_fmt_cond(bta, ctx)}"

    rows = []
    if kind == "laplace":
        data = _boundary_data_from(cfg, ctx, len(domain.holes))
        oversample = _as_int(cfg.get("oversample", 3), "oversample", minimum=1)
        header = f"k_max,m,samples,sup_error{cond_header},status"
        for k in k_values:
            m = BasisSpec(domain, k).m
            try:
                sol = solve_laplace(domain, data, k, oversample=oversample)
                rows.append(f"{k},{m},{sol.samples_used},"
                            f"{_fmt(sol.boundary_sup_error, ctx)}"
                            f"{cond_cells(k, oversample)},ok")
            except TorusError as e:
                nans = ",nan,nan" if want_cond else ""
                rows.append(f"{k},{m},,nan{nans},error:{type(e).__name__}")
    else:
        n_eigs = _as_int(cfg.get("n_eigs", 7), "n_eigs", minimum=1)
        header = ("k_max,m,samples,"
                  + ",".join(f"sigma_{i},res_{i}" for i in range(1, n_eigs + 1))
                  + cond_header + ",status")
        for k in k_values:
            m = BasisSpec(domain, k).m
            base = dict(cfg)
            base["k_max"] = k
            try:
                scfg = _steklov_config_from(base, argparse.Namespace(kmax=None))
                cands = solve_steklov(domain, scfg)
                cells = []
                for i in range(n_eigs):
                    if i < len(cands):
                        cells.append(_fmt(cands[i].sigma, ctx))
                        cells.append(_fmt(cands[i].residual_l2, ctx))
                    else:
                        cells.append("nan")
                        cells.append("nan")
                S = max(scfg.oversample * m, 8 * len(domain.holes))
                rows.append(f"{k},{m},{S}," + ",".join(cells)
                            + cond_cells(k, scfg.oversample) + ",ok")
            except TorusError as e:
                cells = ["nan"] * (2 * n_eigs)
                nans = ",nan,nan" if want_cond else ""
                rows.append(f"{k},{m},," + ",".join(cells)
                            + f"{nans},error:{type(e).__name__}")

    tmp = csv_path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(header + "\n" + "\n".join(rows) + "\n")
    os.replace(tmp, csv_path)
    report = {"kind": kind, "rows": len(rows), "csv": csv_path}
    _emit(report, args, "convergence_report.json")
    return 0


_DISPATCH = {
    "invariants": cmd_invariants,
    "laplace": cmd_laplace,
    "steklov": cmd_steklov,
    "convergence": cmd_convergence,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="torusharmonics",
        description="harmonic fields and Steklov spectra on punctured flat tori")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("invariants", "laplace", "steklov", "convergence"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON job description")
        p.add_argument("--bits", type=int, help="override config precision")
        p.add_argument("--kmax", type=int, help="override basis order")
        p.add_argument("--grid", type=int, help="override export grid size")
        p.add_argument("--out", default=".", help="output directory")
    args = parser.parse_args(argv)
    try:
        cfg = _load_json(args.config)
        return _DISPATCH[args.command](cfg, args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except TorusError as e:
        print(f"computation error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
