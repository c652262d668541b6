"""Command-line interface: ``zetafourier {zeros,coeffs,verify,reconstruct}``.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 input/output
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .analysis import reconstruction_report
from .basis import QuadratureSpec
from .coefficients import (FunctionSpec, Kind, Method, Weight, build_table, calibrate_bar,
                           calibrate_hat, calibrate_tilde_negative, calibrate_xi, check_method,
                           meta_hash)
from .errors import NumericError, ZeroTableError
from .specialfn import PrecisionProfile, use_profile
from .verify import SUITES, run
from .zeros import ZeroTable, build_table as build_zero_table, bundled_zero_path, parse_zero_lines

EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- config ----

_KEYS = {
    "quadrature.nodes": int,
    "quadrature.y_max": float,
    "quadrature.tol": float,
    "zeta.em_terms": int,
    "zeta.em_bernoulli": int,
    "deriv.radius": float,
    "deriv.nodes": int,
    "series.k_max": int,
    "zeros.count": int,
    "zeros.path": str,
    "cache.dir": str,
}


def default_cache_dir() -> str:
    return os.environ.get("ZETAFOURIER_CACHE", str(Path.home() / ".cache" / "zetafourier"))


@dataclass
class RunConfig:
    """Settings read from ``key=value`` lines; command-line flags override them."""

    values: dict = field(default_factory=lambda: {
        "quadrature.nodes": 16,
        "quadrature.y_max": 5000.0,
        "quadrature.tol": 1e-10,
        "zeta.em_terms": 50,
        "zeta.em_bernoulli": 25,
        "deriv.radius": 0.2,
        "deriv.nodes": 64,
        "series.k_max": 256,
        "zeros.count": 100,
        "zeros.path": "",
        "cache.dir": default_cache_dir(),
    })

    def set(self, key: str, raw) -> None:
        if key not in _KEYS:
            raise UsageError(f"unknown configuration key {key!r}")
        try:
            value = _KEYS[key](raw)
        except (TypeError, ValueError):
            raise UsageError(f"{key} expects {_KEYS[key].__name__}, got {raw!r}") from None
        if _KEYS[key] is not str and not value > 0:
            raise UsageError(f"{key} must be positive")
        self.values[key] = value

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        cfg = cls()
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"config line {lineno}: expected key=value")
            key, raw = (part.strip() for part in line.split("=", 1))
            cfg.set(key, raw)
        return cfg

    def __getitem__(self, key):
        return self.values[key]

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(nodes=self["quadrature.nodes"], y_max=self["quadrature.y_max"],
                              tol=self["quadrature.tol"])

    def profile(self) -> PrecisionProfile:
        return PrecisionProfile(em_terms=self["zeta.em_terms"], em_bernoulli=self["zeta.em_bernoulli"],
                                deriv_radius=self["deriv.radius"], deriv_nodes=self["deriv.nodes"])

    def hash(self) -> str:
        """Hash of every setting that can change a numerical result."""
        relevant = {k: v for k, v in self.values.items() if k != "cache.dir"}
        return hashlib.sha256(json.dumps(relevant, sort_keys=True).encode()).hexdigest()[:16]

    @property
    def cache_dir(self) -> Path:
        return Path(self["cache.dir"])


# ------------------------------------------------------------------ I/O ----


def atomic_write(path: Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(data: bytes, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(data.decode())
        sys.stdout.flush()
    else:
        atomic_write(Path(out), data)


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def dump_json(obj) -> bytes:
    return (json.dumps(_finite(obj), indent=2) + "\n").encode()


def _zero_cache_file(cfg: RunConfig, text: str) -> Path:
    key = hashlib.sha256((text + cfg.hash()).encode()).hexdigest()[:16]
    return cfg.cache_dir / f"zeros-{key}.json"


def load_zeros(cfg: RunConfig, path: str | None = None) -> ZeroTable:
    """Zero table from ``path`` (or zeros.path, or the bundled file), cached with zeta' values."""
    source = Path(path or cfg["zeros.path"] or bundled_zero_path())
    text = source.read_text(encoding="utf-8")
    cached = _zero_cache_file(cfg, text)
    if cached.exists():
        blob = json.loads(cached.read_text())
        table = ZeroTable(tuple(blob["betas"]), tuple(complex(*z) for z in blob["zeta_prime"]))
    else:
        betas = parse_zero_lines(text.splitlines())
        table = build_zero_table(betas, PrecisionProfile(
            em_terms=cfg["zeta.em_terms"], em_bernoulli=cfg["zeta.em_bernoulli"], deriv_radius=0.1,
            deriv_nodes=cfg["deriv.nodes"]))
        blob = {"source": str(source), "betas": list(table.betas),
                "zeta_prime": [[z.real, z.imag] for z in table.zeta_prime]}
        atomic_write(cached, dump_json(blob))
    count = min(cfg["zeros.count"], table.count) if path is None else table.count
    return table.truncated(count)


# -------------------------------------------------------------- commands ----


def _spec_from_args(args) -> FunctionSpec:
    fn = args.function
    try:
        if fn == "inv-zeta":
            return FunctionSpec.inv_zeta(_need(args.sigma, "--sigma"))
        if fn == "inv-zeta-conj":
            return FunctionSpec.inv_zeta_conj(_need(args.sigma, "--sigma"))
        if fn == "zeta-cos-v":
            return FunctionSpec.zeta_cos_v(_need(args.sigma, "--sigma"), complex(args.v), Weight(args.weight))
        if fn == "xi-weighted":
            return FunctionSpec.xi_weighted()
        return FunctionSpec.custom(lambda y: np.ones(np.shape(y), dtype=complex), "constant")
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required for this function")
    return value


def parse_range(text: str) -> tuple[int, int]:
    try:
        lo, _, hi = text.partition("..")
        lo, hi = int(lo), int(hi or lo)
    except ValueError:
        raise UsageError(f"index range must look like A..B, got {text!r}") from None
    if lo > hi:
        raise UsageError("empty index range")
    return lo, hi


_FAMILY_CALIBRATION = {
    Kind.INV_ZETA: lambda q, zeros: calibrate_bar(q=q),
    Kind.INV_ZETA_CONJ: lambda q, zeros: calibrate_hat(zeros, q=q),
    Kind.ZETA_COS_V: lambda q, zeros: calibrate_tilde_negative(q=q),
    Kind.XI_WEIGHTED: lambda q, zeros: calibrate_xi(q=q),
}


def _table(cfg: RunConfig, spec: FunctionSpec, lo: int, hi: int, method: Method):
    try:
        check_method(spec, method, lo, hi)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    q = cfg.quadrature()
    zeros = load_zeros(cfg) if spec.kind is Kind.INV_ZETA_CONJ and method is Method.RESIDUE else None
    if method in (Method.RESIDUE, Method.THETA_INTEGRAL):
        rec = _FAMILY_CALIBRATION[spec.kind](q, zeros)
        if not rec.agreed:
            raise NumericError(f"calibration of the {rec.family!r} family found no agreeing convention")
    return build_table(spec, lo, hi, method, q, zeros, k_max=cfg["series.k_max"])


def cmd_coeffs(cfg: RunConfig, args) -> int:
    spec = _spec_from_args(args)
    lo, hi = parse_range(args.n)
    method = Method(args.method)
    key = meta_hash({"spec": spec.params(), "method": method.value, "range": [lo, hi], "config": cfg.hash()})
    cached = cfg.cache_dir / f"coeffs-{key}.csv"
    if cached.exists():
        emit(cached.read_bytes(), args.out)
        return 0
    table = _table(cfg, spec, lo, hi, method)
    lines = ["n,re,im,method,abs_err_est"]
    for n in range(lo, hi + 1):
        z = table[n]
        lines.append(f"{n},{z.real:.17g},{z.imag:.17g},{method.value},{table.errors[n]:.17g}")
    data = ("\n".join(lines) + "\n").encode()
    atomic_write(cached, data)
    emit(data, args.out)
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    zeros = load_zeros(cfg) if args.suite in ("theorem11", "all") else None
    checks = run(args.suite, cfg.quadrature(), zeros)
    report = {"config_hash": cfg.hash(), "suite": args.suite, "checks": [c.to_dict() for c in checks]}
    emit(dump_json(report), args.out)
    failed = [c.name for c in checks if not c.passed and not c.info]
    if failed:
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return EXIT_NUMERIC
    return 0


def _grid(text: str) -> np.ndarray:
    try:
        a, b, count = text.split(":")
        a, b, count = float(a), float(b), int(count)
    except ValueError:
        raise UsageError(f"grid must look like start:stop:count, got {text!r}") from None
    if count < 1:
        raise UsageError("grid count must be positive")
    return np.linspace(a, b, count)


def cmd_reconstruct(cfg: RunConfig, args) -> int:
    spec = _spec_from_args(args)
    if args.N < 0:
        raise UsageError("N must be nonnegative")
    grid = _grid(args.grid)
    table = _table(cfg, spec, -args.N, args.N, Method(args.method))
    report = reconstruction_report(spec, table, grid, args.N, cfg.quadrature())
    out = {"config_hash": cfg.hash(), **report.to_dict()}
    emit(dump_json(out), args.out)
    return 0


def cmd_zeros_import(cfg: RunConfig, args) -> int:
    table = load_zeros(cfg, args.path)
    summary = {"config_hash": cfg.hash(), "count": table.count, "first": table.betas[0],
               "last": table.betas[-1], "min_abs_zeta_prime": min(abs(z) for z in table.zeta_prime)}
    emit(dump_json(summary), args.out)
    return 0


# ---------------------------------------------------------------- parser ----


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_function_args(p):
    p.add_argument("--function", required=True,
                   choices=["inv-zeta", "inv-zeta-conj", "zeta-cos-v", "xi-weighted", "constant"])
    p.add_argument("--sigma", type=float)
    p.add_argument("--v", type=complex, default=1.0)
    p.add_argument("--weight", choices=[w.value for w in Weight], default=Weight.HALF_ANGLE.value)
    p.add_argument("--method", choices=[m.value for m in Method], default=Method.QUADRATURE.value)
    p.add_argument("--out", default=None, help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zetafourier", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key=value configuration file")
    for key, typ in _KEYS.items():
        parser.add_argument(f"--{key}", dest=key, default=None, metavar=typ.__name__.upper())
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    zeros = sub.add_parser("zeros", help="zero-table management")
    zsub = zeros.add_subparsers(dest="zeros_command", required=True, parser_class=_Parser)
    imp = zsub.add_parser("import", help="validate a zero file and cache zeta' at each zero")
    imp.add_argument("path")
    imp.add_argument("--out", default=None)

    coeffs = sub.add_parser("coeffs", help="coefficient table as CSV")
    _add_function_args(coeffs)
    coeffs.add_argument("--n", required=True, help="index range A..B")

    verify = sub.add_parser("verify", help="run a verification suite")
    verify.add_argument("suite", choices=list(SUITES) + ["all"])
    verify.add_argument("--out", default=None)

    rec = sub.add_parser("reconstruct", help="partial-sum reconstruction report as JSON")
    _add_function_args(rec)
    rec.add_argument("--N", type=int, required=True)
    rec.add_argument("--grid", default="-2:2:41", help="start:stop:count in x")
    return parser


def _glue_negative_values(argv: list[str]) -> list[str]:
    # allow "--n -6..6" as well as "--n=-6..6"
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--n", "--grid") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = build_parser().parse_args(argv)
        cfg = RunConfig()
        if args.config:
            try:
                text = Path(args.config).read_text(encoding="utf-8")
            except OSError as exc:
                print(f"error: cannot read config: {exc}", file=sys.stderr)
                return EXIT_IO
            cfg = RunConfig.from_text(text)
        for key in _KEYS:
            if getattr(args, key) is not None:
                cfg.set(key, getattr(args, key))
        commands = {"coeffs": cmd_coeffs, "verify": cmd_verify, "reconstruct": cmd_reconstruct,
                    "zeros": cmd_zeros_import}
        with use_profile(cfg.profile()):
            return commands[args.command](cfg, args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ZeroTableError as exc:
        print(f"zero table error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
