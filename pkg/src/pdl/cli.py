"""Command-line front end: sweeps, caching, model evaluation, reports."""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from pathlib import Path

from . import __version__, asympt, classnum, moments, randmodel
from .arith import sieve_primes
from .errors import CacheError, InsufficientSweepError, PdlError

EXIT_USAGE = 2
EXIT_UNWRITABLE = 3
EXIT_INSUFFICIENT_CACHE = 4


def _parse_int(s: str) -> int:
    return int(float(s))


def _parse_int_list(s: str) -> list[int]:
    return [_parse_int(tok) for tok in s.split(",") if tok.strip()]


def _parse_float_list(s: str) -> list[float]:
    return [float(tok) for tok in s.split(",") if tok.strip()]


def _parse_complex(tok: str) -> complex:
    return complex(tok.strip().replace("i", "j"))


def _parse_complex_list(s: str) -> list[complex]:
    return [_parse_complex(tok) for tok in s.split(",") if tok.strip()]


def read_config_file(path: str) -> dict[str, str]:
    """Key = value lines; '#' starts a comment; later keys win."""
    out: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PdlError(f"config line not of the form key = value: {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def default_cache_dir() -> Path:
    env = os.environ.get("PDL_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "pdl"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file; explicit flags win")
    common.add_argument("--cache-dir", help="cache directory (default: $PDL_CACHE_DIR or ~/.cache/pdl)")
    common.add_argument("--output", "-o", help="output path, '-' for stdout (default)")
    common.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    common.add_argument("--threads", type=int, help="worker threads (default 1)")
    common.add_argument("--seed", type=int, help="random seed (default 0)")

    ap = argparse.ArgumentParser(prog="pdl", description=__doc__)
    ap.add_argument("--version", action="version", version=f"pdl {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sieve", parents=[common], help="list primes up to a bound")
    p.add_argument("--x", required=True, help="sieve bound")
    p.add_argument("--class", dest="residue", choices=("all", "3mod4"), default=None)

    p = sub.add_parser("hist", parents=[common], help="sweep class numbers and histogram them")
    p.add_argument("--X", required=True, help="sweep bound")
    p.add_argument("--method", choices=("forms", "dirichlet"), default=None)

    p = sub.add_parser("sumodd", parents=[common], help="count fields with odd class number <= H")
    p.add_argument("--H", required=True, help="class number bound(s), comma separated")
    p.add_argument("--X", required=True, help="sweep bound")
    p.add_argument("--method", choices=("forms", "dirichlet"), default=None)
    p.add_argument("--allow-partial", action="store_true",
                   help="report with a coverage caveat instead of failing when the sweep may be short")

    p = sub.add_parser("moments", parents=[common], help="empirical vs predicted moments")
    p.add_argument("--x", required=True, help="sweep bounds, comma separated")
    p.add_argument("--z", required=True, help="complex exponents, comma separated (e.g. 1,-2,1+1i)")
    p.add_argument("--method", choices=("forms", "dirichlet"), default=None)
    p.add_argument("--P", help="random-model prime cutoff")
    p.add_argument("--exc-q1", help="exceptional modulus q1 (square-free, nonzero)")
    p.add_argument("--exc-beta", help="exceptional zero beta in (1/2, 1)")

    p = sub.add_parser("model", parents=[common], help="random-model expectations, product and series")
    p.add_argument("--z", required=True, help="complex exponent")
    p.add_argument("--q", default=None, help="square-free twist modulus (default 1)")
    p.add_argument("--sigma", default=None, help="series exponent in (1/2, 1] (default 1)")
    p.add_argument("--P", help="prime cutoff")
    p.add_argument("--M", help="series cutoff")
    p.add_argument("--tolerance", help="series tail tolerance")

    p = sub.add_parser("tails", parents=[common], help="Monte Carlo tail probabilities")
    p.add_argument("--tau", required=True, help="tau values, comma separated")
    p.add_argument("--samples", help="Monte Carlo sample count")
    p.add_argument("--P", help="prime cutoff")

    p = sub.add_parser("kernel", parents=[common], help="smoothed Perron kernel profile")
    p.add_argument("--y", required=True, help="evaluation points, comma separated")
    p.add_argument("--c", help="line abscissa c > 0")
    p.add_argument("--lam", help="smoothing lambda > 0")
    p.add_argument("--N", help="smoothing power N >= 0")
    p.add_argument("--tol", help="quadrature tolerance")
    p.add_argument("--H", help="derive (c, lambda, N) defaults from a class-number bound")

    p = sub.add_parser("conjecture", parents=[common], help="conjectured F(h) table")
    p.add_argument("--h", required=True, help="odd h values, comma separated")
    p.add_argument("--X", help="sweep bound for observed counts (optional)")
    p.add_argument("--method", choices=("forms", "dirichlet"), default=None)

    p = sub.add_parser("report", parents=[common], help="composite JSON report")
    p.add_argument("--X", required=True, help="sweep bound")
    p.add_argument("--method", choices=("forms", "dirichlet"), default=None)
    p.add_argument("--x", help="moment sweep bounds (default: X)")
    p.add_argument("--z", help="moment exponents (default: 1,-1,2,-2)")
    p.add_argument("--H", help="sum-odd bounds (default: 50,100,200)")
    p.add_argument("--h-odd", help="conjecture table h values (default: 3,5,...,99)")
    p.add_argument("--P", help="random-model prime cutoff")
    return ap


def _setting(args, cfg_file: dict[str, str], name: str, default, convert):
    cli_val = getattr(args, name, None)
    if cli_val is not None and cli_val is not False:
        return convert(cli_val) if isinstance(cli_val, str) else cli_val
    if name in cfg_file:
        return convert(cfg_file[name])
    return default


class Run:
    """Resolved settings for one invocation: flags beat config file beats defaults."""

    def __init__(self, args):
        cfg_file = read_config_file(args.config) if getattr(args, "config", None) else {}
        self.args = args
        self.cfg_file = cfg_file
        self.format = _setting(args, cfg_file, "format", "csv", str)
        self.threads = _setting(args, cfg_file, "threads", 1, int)
        self.seed = _setting(args, cfg_file, "seed", 0, int)
        self.output = _setting(args, cfg_file, "output", "-", str)
        cache_dir = getattr(args, "cache_dir", None) or cfg_file.get("cache_dir")
        self.cache_dir = Path(cache_dir) if cache_dir else default_cache_dir()
        if self.threads < 1:
            raise PdlError("threads must be >= 1")

    def setting(self, name, default, convert=str):
        return _setting(self.args, self.cfg_file, name, default, convert)

    def model_config(self, **overrides) -> randmodel.ModelConfig:
        return randmodel.ModelConfig(
            prime_cutoff=overrides.get("P", self.setting("P", 10**4, _parse_int)),
            series_cutoff=overrides.get("M", self.setting("M", 10**5, _parse_int)),
            mc_samples=overrides.get("samples", self.setting("samples", 10**4, _parse_int)),
            seed=self.seed,
            tolerance=overrides.get("tolerance", self.setting("tolerance", 1.0, float)),
        )

    def emit(self, text: str) -> None:
        if self.output in ("-", "", None):
            sys.stdout.write(text)
            return
        try:
            Path(self.output).parent.mkdir(parents=True, exist_ok=True)
            Path(self.output).write_text(text)
        except OSError as exc:
            raise _Unwritable(str(exc)) from exc

    def metadata(self, command: str, echo: dict, checksums: dict | None = None) -> None:
        block = {
            "tool": "pdl",
            "version": __version__,
            "command": command,
            "config": {
                "cache_dir": str(self.cache_dir),
                "format": self.format,
                "threads": self.threads,
                "seed": self.seed,
                **echo,
            },
        }
        if checksums:
            block["checksums"] = checksums
        print(json.dumps({"metadata": block}, sort_keys=True), file=sys.stderr)


class _Unwritable(Exception):
    pass


def cmd_sieve(run: Run) -> None:
    x = _parse_int(run.args.x)
    residue = run.setting("residue", "all")
    plist = sieve_primes(x, class_3mod4=(residue == "3mod4"))
    run.metadata("sieve", {"x": x, "class": residue})
    if run.format == "json":
        run.emit(json.dumps({"bound": x, "class": residue, "primes": plist.primes.tolist()}) + "\n")
    else:
        run.emit("p\n" + "".join(f"{p}\n" for p in plist.primes.tolist()))


def _table(run: Run, x: int, method: str) -> classnum.ClassTable:
    return classnum.sweep_class_numbers(x, method=method, threads=run.threads, cache_dir=run.cache_dir)


def cmd_hist(run: Run) -> None:
    x = _parse_int(run.args.X)
    method = run.setting("method", "forms")
    table = _table(run, x, method)
    hist = classnum.build_histogram(x, method=method, threads=run.threads, cache_dir=run.cache_dir)
    run.metadata("hist", {"X": x, "method": method}, {"table_crc32": table.checksum})
    if run.format == "json":
        run.emit(json.dumps({"X": x, "method": method, "checksum": table.checksum,
                             "counts": {str(k): v for k, v in sorted(hist.counts.items())}}) + "\n")
    else:
        buf = io.StringIO()
        classnum.export_table_csv(table, buf)
        run.emit(buf.getvalue())


def cmd_sumodd(run: Run) -> None:
    x = _parse_int(run.args.X)
    method = run.setting("method", "forms")
    allow_partial = bool(run.args.allow_partial)
    table = _table(run, x, method)
    rows = []
    for h in _parse_int_list(run.args.H):
        bound = classnum.coverage_bound(h, table)
        covered = x >= bound
        s = classnum.sum_odd_F(h, table, require_coverage=not allow_partial)
        main = asympt.theorem1_main(h) if h > 1 else float("nan")
        rows.append({"H": h, "sum_odd_F": s, "main_term": main,
                     "ratio": s / main if h > 1 else float("nan"),
                     "covered": covered, "coverage_bound": bound})
    run.metadata("sumodd", {"X": x, "method": method, "allow_partial": allow_partial},
                 {"table_crc32": table.checksum})
    if run.format == "json":
        run.emit(json.dumps({"X": x, "rows": rows}) + "\n")
    else:
        out = "H,sum_odd_F,main_term,ratio,covered,coverage_bound\n"
        for r in rows:
            out += (f"{r['H']},{r['sum_odd_F']},{r['main_term']:.8g},{r['ratio']:.8g},"
                    f"{str(r['covered']).lower()},{r['coverage_bound']:.6g}\n")
        run.emit(out)


def _exceptional(run: Run) -> moments.ExceptionalModulus | None:
    q1 = run.setting("exc_q1", None, _parse_int)
    beta = run.setting("exc_beta", None, float)
    if q1 is None and beta is None:
        return None
    if q1 is None or beta is None:
        raise PdlError("exceptional modulus needs both --exc-q1 and --exc-beta")
    return moments.ExceptionalModulus(q1=q1, beta=beta)


def cmd_moments(run: Run) -> None:
    xs = _parse_int_list(run.args.x)
    zs = _parse_complex_list(run.args.z)
    method = run.setting("method", "forms")
    cfg = run.model_config(P=run.setting("P", 10**6, _parse_int))
    table = _table(run, max(xs), method)
    recs = moments.moment_sweep(xs, zs, cfg, table, exc=_exceptional(run))
    run.metadata("moments", {"x": xs, "z": [str(z) for z in zs], "method": method,
                             "P": cfg.prime_cutoff}, {"table_crc32": table.checksum})
    if run.format == "json":
        buf = io.StringIO()
        moments.dump_report(moments.moments_report(recs, cfg, table.checksum), buf)
        run.emit(buf.getvalue())
    else:
        buf = io.StringIO()
        moments.export_moments_csv(recs, buf)
        run.emit(buf.getvalue())


def cmd_model(run: Run) -> None:
    z = _parse_complex(run.args.z)
    q = run.setting("q", 1, _parse_int)
    sigma = run.setting("sigma", 1.0, float)
    cfg = run.model_config()
    prod = randmodel.expectation_product(z, q, cfg)
    series = randmodel.expectation_series(z, q, sigma, cfg)
    run.metadata("model", {"z": str(z), "q": q, "sigma": sigma,
                           "P": cfg.prime_cutoff, "M": cfg.series_cutoff})
    payload = {
        "z": str(z), "q": q, "sigma": sigma,
        "product": {"re": prod.value.real, "im": prod.value.imag,
                    "truncation_bound": prod.truncation_bound, "P": prod.P_used},
        "series": {"re": series.value.real, "im": series.value.imag,
                   "tail_bound": series.tail_bound, "M": series.M_used},
        "difference": abs(prod.value - series.value),
    }
    if run.format == "json":
        run.emit(json.dumps(payload, indent=2) + "\n")
    else:
        run.emit(
            "quantity,re,im,bound\n"
            f"product,{prod.value.real:.12g},{prod.value.imag:.12g},{prod.truncation_bound:.6g}\n"
            f"series,{series.value.real:.12g},{series.value.imag:.12g},{series.tail_bound:.6g}\n"
        )


def cmd_tails(run: Run) -> None:
    taus = _parse_float_list(run.args.tau)
    cfg = run.model_config(samples=run.setting("samples", 10**5, _parse_int))
    rows = randmodel.tails_table(taus, cfg, threads=run.threads)
    run.metadata("tails", {"tau": taus, "samples": cfg.mc_samples, "P": cfg.prime_cutoff})
    if run.format == "json":
        run.emit(json.dumps([r.__dict__ for r in rows], indent=2) + "\n")
    else:
        buf = io.StringIO()
        randmodel.export_tails_csv(rows, cfg, buf)
        run.emit(buf.getvalue())


def cmd_kernel(run: Run) -> None:
    ys = _parse_float_list(run.args.y)
    h = run.setting("H", None, float)
    if h is not None:
        params = asympt.kernel_params_for(h, quad_tol=run.setting("tol", 1e-8, float))
    else:
        params = asympt.KernelParams(
            c=run.setting("c", 0.1, float),
            lam=run.setting("lam", 0.1, float),
            N=run.setting("N", 5, int),
            quad_tol=run.setting("tol", 1e-8, float),
        )
    run.metadata("kernel", {"y": ys, "c": params.c, "lambda": params.lam,
                            "N": params.N, "tol": params.quad_tol})
    if run.format == "json":
        run.emit(json.dumps({"params": {"c": params.c, "lambda": params.lam, "N": params.N,
                                        "quad_tol": params.quad_tol},
                             "values": {str(y): asympt.kernel_I(y, params) for y in ys}},
                            indent=2) + "\n")
    else:
        buf = io.StringIO()
        asympt.export_kernel_csv(ys, params, buf)
        run.emit(buf.getvalue())


def cmd_conjecture(run: Run) -> None:
    hs = _parse_int_list(run.args.h)
    observed: dict[int, int] = {}
    checksums = None
    x = run.setting("X", None, _parse_int)
    if x is not None:
        method = run.setting("method", "forms")
        hist = classnum.build_histogram(x, method=method, threads=run.threads, cache_dir=run.cache_dir)
        observed = hist.counts
        checksums = {"table_crc32": hist.checksum}
    run.metadata("conjecture", {"h": hs, "X": x}, checksums)
    if run.format == "json":
        rows = [{"h": h, "F_observed": observed.get(h, 0), "F_conjectured": asympt.conjecture_F(h)}
                for h in hs]
        run.emit(json.dumps(rows, indent=2) + "\n")
    else:
        buf = io.StringIO()
        asympt.export_conjecture_csv(hs, observed, buf)
        run.emit(buf.getvalue())


def cmd_report(run: Run) -> None:
    x = _parse_int(run.args.X)
    method = run.setting("method", "forms")
    xs = _parse_int_list(run.args.x) if run.args.x else [x]
    zs = _parse_complex_list(run.args.z) if run.args.z else [1, -1, 2, -2]
    hs = _parse_int_list(run.args.H) if run.args.H else [50, 100, 200]
    h_odd = _parse_int_list(run.args.h_odd) if getattr(run.args, "h_odd", None) else list(range(3, 100, 2))
    cfg = run.model_config(P=run.setting("P", 10**6, _parse_int))
    table = _table(run, max([x] + xs), method)
    hist = classnum.build_histogram(x, method=method, threads=run.threads, cache_dir=run.cache_dir)
    recs = moments.moment_sweep(xs, zs, cfg, table, exc=None)
    sum_rows = []
    for h in hs:
        bound = classnum.coverage_bound(h, table)
        sum_rows.append({
            "H": h,
            "sum_odd_F": classnum.sum_odd_F(h, table, require_coverage=False),
            "main_term": asympt.theorem1_main(h),
            "covered": table.X >= bound,
            "coverage_bound": bound,
        })
    const = asympt.conjecture_C()
    doc = {
        "metadata": {
            "tool": "pdl", "version": __version__,
            "config": {"X": x, "method": method, "x": xs, "z": [str(z) for z in zs],
                       "H": hs, "P": cfg.prime_cutoff, "seed": run.seed,
                       "threads": run.threads},
            "checksums": {"table_crc32": table.checksum},
        },
        "histogram": {"X": x, "method": method,
                      "counts": {str(k): v for k, v in sorted(hist.counts.items())}},
        "sum_odd": sum_rows,
        "moments": moments.moments_report(recs, cfg, table.checksum)["records"],
        "conjecture": {
            "C": {"value": const.value, "tail_bound": const.tail_bound},
            "table": [{"h": h, "F_observed": hist.counts.get(h, 0),
                       "F_conjectured": asympt.conjecture_F(h)} for h in h_odd],
        },
    }
    run.metadata("report", doc["metadata"]["config"], doc["metadata"]["checksums"])
    run.emit(json.dumps(doc, indent=2, sort_keys=True) + "\n")


_DISPATCH = {
    "sieve": cmd_sieve,
    "hist": cmd_hist,
    "sumodd": cmd_sumodd,
    "moments": cmd_moments,
    "model": cmd_model,
    "tails": cmd_tails,
    "kernel": cmd_kernel,
    "conjecture": cmd_conjecture,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = Run(args)
        _DISPATCH[args.command](run)
    except _Unwritable as exc:
        print(f"pdl: unwritable output: {exc}", file=sys.stderr)
        return EXIT_UNWRITABLE
    except (InsufficientSweepError, CacheError) as exc:
        print(f"pdl: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT_CACHE
    except PdlError as exc:
        print(f"pdl: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"pdl: {exc}", file=sys.stderr)
        return EXIT_UNWRITABLE
    return 0


if __name__ == "__main__":
    sys.exit(main())
