"""Command-line entry point: ``qkdseed <subcommand> ...``.

Exit codes: 0 success, 1 bound violation found by ``verify``, 2 I/O error,
3 estimation error, 4 resource limit, 5 configuration error.

Parameters for ``keyrate`` and ``scan`` come from a ``key = value`` file
(``--config``), then ``QKDSEED_<KEY>`` environment variables, then
``--set key=value`` flags, later sources winning. Unknown keys are errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
from dataclasses import fields

import numpy as np

from . import bounds, decoy_bb84, entropy, hashing, oracle
from .errors import EstimationError, ParameterError, ResourceError, ValidationError

EXIT_OK, EXIT_VIOLATION, EXIT_IO, EXIT_ESTIMATION, EXIT_RESOURCE, EXIT_CONFIG = range(6)
ENV_PREFIX = "QKDSEED_"


class ConfigError(Exception):
    pass


def _config_keys() -> set[str]:
    keys = set()
    for cls in (decoy_bb84.ChannelModel, decoy_bb84.ProtocolParams, bounds.SecurityParams):
        keys |= {f.name for f in fields(cls)}
    return keys


def parse_config_text(text: str, source: str = "<config>") -> dict[str, float]:
    known = _config_keys()
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"unknown config key {key!r} ({source}:{lineno})")
        try:
            out[key] = float(value)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: {key} is not a number: {value!r}") from None
    return out


def resolve_config(path: str | None, overrides: list[str], environ=os.environ) -> dict[str, float]:
    values = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read(), path))
    env_lines = [f"{k[len(ENV_PREFIX):].lower()}={v}" for k, v in sorted(environ.items())
                 if k.startswith(ENV_PREFIX)]
    values.update(parse_config_text("\n".join(env_lines), "environment"))
    values.update(parse_config_text("\n".join(overrides), "--set"))
    return values


def _build_params(args):
    values = resolve_config(args.config, args.set or [])
    try:
        return decoy_bb84.channel_from_mapping(values)
    except (ValidationError, ParameterError) as exc:
        raise ConfigError(str(exc)) from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"not a comma-separated list of numbers: {text!r}") from None


def _g(x) -> str:
    return format(x, ".12g") if isinstance(x, float) else str(x)


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_g(v) for v in r])
    return buf.getvalue()


def _seed_quality(args) -> entropy.SeedQuality:
    if args.h_avg is not None:
        if args.alpha is None:
            raise ConfigError("--h-avg needs --alpha")
        return entropy.seed_quality_from_per_bit(args.alpha, args.h_avg)
    alpha = args.alpha if args.alpha is not None else 0.0
    beta = args.beta if args.beta is not None else alpha
    return entropy.SeedQuality(alpha, beta)


def cmd_entropy(args) -> int:
    est = entropy.estimate_file(args.file, args.confidence, args.symbol_bits)
    text = _rows_csv(
        ("samples", "symbol_bits", "confidence", "point_bits_per_symbol",
         "lower_bits_per_symbol", "point_per_bit", "lower_per_bit"),
        [(est.sample_count, est.symbol_bits, float(est.confidence_level),
          float(est.point_estimate), float(est.lower_confidence_bound),
          float(est.per_bit), float(est.lower_per_bit))],
    )
    _emit(text, args.out)
    return EXIT_OK


def cmd_bound(args) -> int:
    inp = bounds.BoundInputs(args.hmin, args.key_len, _seed_quality(args), args.eps)
    rows = [(float(inp.hmin), float(inp.key_len), float(inp.seed.gap), float(inp.eps_smooth),
             bounds.theorem1_bound(inp), bounds.theorem1_bound(inp, clamp=False))]
    _emit(_rows_csv(("hmin", "key_len", "gap", "eps", "bound", "bound_raw"), rows), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    inp = bounds.BoundInputs(args.hmin, args.key_len, _seed_quality(args), args.eps)
    c = bounds.compare_bounds(inp)
    rows = [(float(inp.hmin), float(inp.key_len), float(inp.seed.gap), c.theorem1_value,
             c.alternative_value, c.theorem1_raw, c.alternative_raw, c.tighter.value,
             int(c.theorem1_tighter_predicate))]
    header = ("hmin", "key_len", "gap", "theorem1", "alternative", "theorem1_raw",
              "alternative_raw", "tighter", "theorem1_tighter_predicate")
    _emit(_rows_csv(header, rows), args.out)
    return EXIT_OK


def cmd_keylen(args) -> int:
    sec = bounds.SecurityParams(args.eps_sec, args.eps_cor, args.eps_smooth)
    b = bounds.key_length_budget(args.hmin, args.leak_ec, sec, _seed_quality(args))
    rows = [(float(b.hmin), float(b.leak_ec), b.pa_cost, b.ec_verification_cost,
             float(b.seed.gap), b.max_key_len)]
    _emit(_rows_csv(("hmin", "leak_ec", "pa_cost", "ec_cost", "gap", "key_len"), rows), args.out)
    return EXIT_OK


def _h_grid(args) -> list[float]:
    grid = []
    if args.presets:
        grid += list(decoy_bb84.table1_presets().values())
    if args.h_grid:
        grid += _float_list(args.h_grid)
    return grid


def cmd_keyrate(args) -> int:
    ch, proto, sec = _build_params(args)
    if args.preset:
        try:
            h = decoy_bb84.preset(args.preset)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
    else:
        h = args.h_avg
    r = decoy_bb84.key_rate(ch, proto, sec, h)
    buf = io.StringIO()
    decoy_bb84.write_scan_csv([r], buf)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    ch, proto, sec = _build_params(args)
    h_grid = _h_grid(args)
    distances = _float_list(args.distances)
    if not h_grid or not distances:
        raise ConfigError("h-grid and distance grid must be non-empty")
    result = decoy_bb84.scan(h_grid, distances, ch, proto, sec)
    buf = io.StringIO()
    decoy_bb84.write_scan_csv(result.rows, buf)
    _emit(buf.getvalue(), args.out)
    if args.critical_out:
        buf = io.StringIO()
        decoy_bb84.write_critical_csv(result.critical, buf)
        atomic_write_text(args.critical_out, buf.getvalue())
    return EXIT_OK


def _read_bits(path: str, count: int) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    bits = entropy.bytes_to_symbols(data, 1)
    if bits.size < count:
        raise ValidationError(f"{path} holds {bits.size} bits, need {count}")
    return bits[:count]


def cmd_pa(args) -> int:
    n, l = args.input_len, args.output_len
    key = _read_bits(args.key, n)
    seed = hashing.ToeplitzSeed(_read_bits(args.seed, n + l - 1), n, l)
    out = hashing.privacy_amplify(key, seed)
    data = np.packbits(out, bitorder="big").tobytes()
    if args.out:
        directory = os.path.dirname(os.path.abspath(args.out))
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, args.out)
    else:
        sys.stdout.write("".join(map(str, out)) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.single:
        n, l = args.n_max, args.l_max
        if n > oracle.MAX_N or l > oracle.MAX_L:
            raise ResourceError(f"oracle limited to n <= {oracle.MAX_N}, l <= {oracle.MAX_L}")
        fam = hashing.HashFamilyDescriptor(n, l)
        beta = fam.seed_len if args.beta is None else args.beta
        rng = np.random.default_rng(args.rng_seed)
        p_xe = oracle.random_joint_distribution(n, args.e_alphabet, rng)
        sds = oracle.adversarial_seed_distributions(fam, beta, args.strategy, p_xe)
        reports = [oracle.verify_theorem1(p_xe, sds[0])]
    else:
        strategies = oracle.STRATEGIES if args.strategy == "all" else (args.strategy,)
        reports = oracle.run_sweep(range(args.n_min, args.n_max + 1), range(args.l_min, args.l_max + 1),
                                   trials=args.trials, strategies=strategies, rng_seed=args.rng_seed)
    buf = io.StringIO()
    oracle.write_report_csv(reports, buf)
    _emit(buf.getvalue(), args.out)
    failures = sum(not r.passed for r in reports)
    print(f"verify: {len(reports)} instances, {failures} violations", file=sys.stderr)
    return EXIT_VIOLATION if failures else EXIT_OK


def cmd_presets(args) -> int:
    rows = [(name, h) for name, h in decoy_bb84.table1_presets().items()]
    _emit(_rows_csv(("name", "h_avg"), rows), args.out)
    return EXIT_OK


def _add_seed_args(p):
    p.add_argument("--alpha", type=float, help="seed length in bits")
    p.add_argument("--beta", type=float, help="seed min-entropy in bits (default: alpha)")
    p.add_argument("--h-avg", type=float, help="per-bit seed min-entropy; beta = h_avg * alpha")


def _add_config_args(p):
    p.add_argument("--config", help="key = value parameter file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one parameter")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkdseed", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="MCV min-entropy estimate of a raw binary file")
    p.add_argument("file")
    p.add_argument("--symbol-bits", type=int, choices=(1, 8), default=1)
    p.add_argument("--confidence", type=float, default=0.99)
    p.set_defaults(func=cmd_entropy)

    for name, func, text in (("bound", cmd_bound, "non-uniform-seed leftover hash bound"),
                             ("compare", cmd_compare, "compare the two distance bounds")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--hmin", type=float, required=True)
        p.add_argument("--key-len", type=float, required=True)
        p.add_argument("--eps", type=float, default=0.0, help="smoothing parameter")
        _add_seed_args(p)
        p.set_defaults(func=func)

    p = sub.add_parser("keylen", help="secure key length with the seed penalty")
    p.add_argument("--hmin", type=float, required=True)
    p.add_argument("--leak-ec", type=float, required=True)
    p.add_argument("--eps-sec", type=float, default=bounds.DEFAULT_EPS_SEC)
    p.add_argument("--eps-cor", type=float, default=bounds.DEFAULT_EPS_COR)
    p.add_argument("--eps-smooth", type=float, default=None)
    _add_seed_args(p)
    p.set_defaults(func=cmd_keylen)

    p = sub.add_parser("keyrate", help="decoy BB84 key rate at one operating point")
    _add_config_args(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--h-avg", type=float, default=1.0)
    g.add_argument("--preset", help="RNG name from the presets table")
    p.set_defaults(func=cmd_keyrate)

    p = sub.add_parser("scan", help="key rate over seed quality x distance")
    _add_config_args(p)
    p.add_argument("--h-grid", help="comma-separated h_avg values")
    p.add_argument("--presets", action="store_true", help="add the preset RNG values to the grid")
    p.add_argument("--distances", default="10,50,100", help="comma-separated km values")
    p.add_argument("--critical-out", help="CSV path for the per-distance critical h_avg")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("pa", help="Toeplitz privacy amplification of a raw key file")
    p.add_argument("--key", required=True, help="key file, MSB-first bits")
    p.add_argument("--seed", required=True, help="seed file, MSB-first bits")
    p.add_argument("--input-len", type=int, required=True)
    p.add_argument("--output-len", type=int, required=True)
    p.set_defaults(func=cmd_pa)

    p = sub.add_parser("verify", help="brute-force check of the leftover hash bound")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--l-min", type=int, default=1)
    p.add_argument("--l-max", type=int, default=3)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--strategy", default="all", choices=("all",) + oracle.STRATEGIES)
    p.add_argument("--single", action="store_true",
                   help="one instance at n=--n-max, l=--l-max")
    p.add_argument("--beta", type=float, help="seed min-entropy for --single")
    p.add_argument("--e-alphabet", type=int, default=2)
    p.add_argument("--rng-seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("presets", help="list RNG presets")
    p.set_defaults(func=cmd_presets)

    for p in sub.choices.values():
        p.add_argument("--out", help="output path (default: stdout)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except EstimationError as exc:
        print(f"estimation error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValidationError, ParameterError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
