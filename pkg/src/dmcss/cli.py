"""Command-line front end.

Subcommands::

    dmcss ber          --config exp.cfg --out ber.csv        # BER curves
    dmcss required-snr --config exp.cfg --out snr.csv        # SE vs required Eb/N0
    dmcss vectors      --config vec.cfg --out vectors.json   # golden IQ vectors

Config files are flat ``key = value`` text; ``#`` starts a comment.  Lists
are comma separated, and ``start:stop:step`` expands to an inclusive grid.
Angles accept ``pi`` forms such as ``pi/8``.

Keys: ``scheme`` (list), ``lambda`` (list/range), ``ebn0_db`` (list/range),
``trials``, ``seed``, ``rho`` (enables 2-tap fading when > 0), ``psi``,
``delta_f``, ``target_ber``.  ``vectors`` additionally takes ``count``
(random sample of that many symbols; default: every symbol).
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import re
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import (
    SchemeId,
    bit_fields,
    modulate_bits,
    scheme_bits_per_symbol,
    spectral_efficiency,
)
from .channels import ChannelSpec
from .css_core import as_sf, pack_bits, unpack_bits
from .simharness import DEFAULT_TRIALS, NoBracketError, SweepConfig, required_snr_at_target, run_sweep

BER_COLUMNS = [
    "scheme", "lambda", "rho", "psi", "delta_f", "ebn0_db",
    "trials", "bit_errors", "ber", "ser", "seed",
]
SNR_COLUMNS = ["scheme", "lambda", "se", "se_decimal", "required_ebn0_db", "status"]

KNOWN_KEYS = {
    "scheme", "lambda", "ebn0_db", "trials", "seed", "rho", "psi",
    "delta_f", "target_ber", "count",
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    schemes: list[SchemeId]
    lambdas: list[int]
    channel: ChannelSpec = field(default_factory=ChannelSpec)
    ebn0_grid: tuple[float, ...] = ()
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    target_ber: float = 1e-3
    count: int | None = None

    def sweeps(self) -> list[SweepConfig]:
        return [
            SweepConfig(
                scheme=s, lam=lam, channel=self.channel, ebn0_grid=self.ebn0_grid,
                trials_per_point=self.trials, target_ber=self.target_ber, master_seed=self.seed,
            )
            for s, lam in itertools.product(self.schemes, self.lambdas)
        ]


_PI = re.compile(r"^(?:([-+]?[\d.eE+-]+)\s*\*\s*)?([-+])?pi(?:\s*/\s*([\d.eE+-]+))?$")


def parse_number(text: str) -> float:
    text = text.strip()
    m = _PI.match(text)
    if m:
        scale, sign, div = m.groups()
        v = math.pi * (float(scale) if scale else 1.0) / (float(div) if div else 1.0)
        return -v if sign == "-" else v
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None


def parse_grid(text: str) -> tuple[float, ...]:
    out: list[float] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            pieces = part.split(":")
            if len(pieces) != 3:
                raise ConfigError(f"range must be start:stop:step, got {part!r}")
            start, stop, step = (parse_number(p) for p in pieces)
            if step <= 0:
                raise ConfigError(f"range step must be positive, got {part!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            out.extend(round(start + i * step, 10) for i in range(count))
        else:
            out.append(parse_number(part))
    return tuple(out)


def read_config_text(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.lower()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def parse_config(text: str, need_detector: bool = True) -> ExperimentConfig:
    kv = read_config_text(text)
    if "scheme" not in kv or "lambda" not in kv:
        raise ConfigError("config needs 'scheme' and 'lambda'")
    try:
        schemes = [SchemeId.parse(s) for s in kv["scheme"].split(",") if s.strip()]
        lam_grid = parse_grid(kv["lambda"])
        lambdas = [int(x) for x in lam_grid]
        if lambdas != list(lam_grid):
            raise ConfigError(f"lambda values must be integers, got {kv['lambda']!r}")
        for lam in lambdas:
            as_sf(lam)
        rho = parse_number(kv.get("rho", "0"))
        channel = ChannelSpec(
            rho=rho,
            psi=parse_number(kv.get("psi", "0")),
            delta_f=parse_number(kv.get("delta_f", "0")),
            fading_enabled=rho > 0,
        )
        cfg = ExperimentConfig(
            schemes=schemes,
            lambdas=lambdas,
            channel=channel,
            ebn0_grid=parse_grid(kv.get("ebn0_db", "")),
            trials=int(kv.get("trials", DEFAULT_TRIALS)),
            seed=int(kv.get("seed", 0)),
            target_ber=parse_number(kv.get("target_ber", "1e-3")),
            count=int(kv["count"]) if "count" in kv else None,
        )
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    if not schemes or not lambdas:
        raise ConfigError("'scheme' and 'lambda' must not be empty")
    if need_detector:
        for s in schemes:
            if not s.has_detector:
                raise ConfigError(
                    f"scheme {s.name} is not supported for BER simulation "
                    "(no non-coherent detector)"
                )
        if not cfg.ebn0_grid:
            raise ConfigError("config needs a non-empty 'ebn0_db' grid")
        try:
            cfg.sweeps()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return cfg


def fmt(x: float) -> str:
    """Locale-independent, round-trip exact float text."""
    return repr(float(x))


# --- commands ----------------------------------------------------------------


def cmd_ber(cfg: ExperimentConfig, threads: int = 1) -> list[dict]:
    rows = []
    ch = cfg.channel
    for sweep in cfg.sweeps():
        for p in run_sweep(sweep, threads):
            rows.append({
                "scheme": sweep.scheme.key,
                "lambda": sweep.lam,
                "rho": fmt(ch.rho if ch.fading_enabled else 0.0),
                "psi": fmt(ch.psi),
                "delta_f": fmt(ch.delta_f),
                "ebn0_db": fmt(p.ebn0_db),
                "trials": p.trials,
                "bit_errors": p.bit_errors,
                "ber": fmt(p.ber),
                "ser": fmt(p.ser),
                "seed": sweep.master_seed,
            })
    return rows


def cmd_required_snr(cfg: ExperimentConfig, threads: int = 1) -> list[dict]:
    rows = []
    for sweep in cfg.sweeps():
        se = spectral_efficiency(sweep.scheme, sweep.lam)
        try:
            res = required_snr_at_target(run_sweep(sweep, threads), sweep.target_ber)
            value, status = fmt(res.ebn0_db_at_target), "ok"
        except NoBracketError:
            value, status = "nan", "unbracketed"
        rows.append({
            "scheme": sweep.scheme.key,
            "lambda": sweep.lam,
            "se": f"{se.numerator}/{se.denominator}",
            "se_decimal": fmt(float(se)),
            "required_ebn0_db": value,
            "status": status,
        })
    return rows


def _symbol_fields(scheme: SchemeId, bits: np.ndarray, lam: int) -> dict:
    return {name: int(pack_bits(bits[s])) for name, s in bit_fields(scheme, lam).items()}


def cmd_vectors(cfg: ExperimentConfig) -> list[dict]:
    records = []
    rng = np.random.default_rng(cfg.seed)
    for scheme, lam in itertools.product(cfg.schemes, cfg.lambdas):
        width = scheme_bits_per_symbol(scheme, lam)
        total = 1 << width
        if cfg.count is None:
            if width > 16:
                raise ConfigError(
                    f"{scheme.name} at lambda={lam} has 2**{width} symbols; set 'count'"
                )
            values = np.arange(total)
        else:
            values = np.sort(rng.choice(total, size=min(cfg.count, total), replace=False))
        words = unpack_bits(values, width)
        waves = modulate_bits(scheme, words, lam)
        for word, wave in zip(words, waves):
            iq = np.empty(2 * len(wave))
            iq[0::2] = wave.real
            iq[1::2] = wave.imag
            records.append({
                "scheme": scheme.key,
                "lambda": lam,
                "bits": "".join(map(str, word)),
                "symbol": _symbol_fields(scheme, word, lam),
                "samples": iq.tolist(),
            })
    return records


def record_waveform(record: dict) -> np.ndarray:
    iq = np.asarray(record["samples"], dtype=float)
    return iq[0::2] + 1j * iq[1::2]


def remodulate(record: dict) -> np.ndarray:
    scheme = SchemeId.parse(record["scheme"])
    bits = np.array([[int(c) for c in record["bits"]]], dtype=np.uint8)
    return modulate_bits(scheme, bits, record["lambda"])[0]


# --- output --------------------------------------------------------------------


def render(rows: list[dict], columns: list[str] | None, fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps(rows, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dmcss", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("ber", "simulate BER curves"),
        ("required-snr", "find Eb/N0 at the target BER for each scheme and lambda"),
        ("vectors", "export golden IQ vectors as JSON"),
    ]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--out", required=True, help="output path ('-' for stdout)")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--threads", type=int, default=1, help="worker threads, 0 = auto")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text, need_detector=args.command != "vectors")
        if args.seed is not None:
            if not 0 <= args.seed < 2 ** 64:
                raise ConfigError("--seed must be an unsigned 64-bit integer")
            cfg.seed = args.seed
        if args.threads < 0:
            raise ConfigError("--threads must be >= 0")
        if args.command == "vectors" and args.format != "json":
            raise ConfigError("vectors are only written as JSON (use --format json)")
    except ConfigError as exc:
        print(f"error: {args.config}: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "ber":
            out = render(cmd_ber(cfg, args.threads), BER_COLUMNS, args.format)
        elif args.command == "required-snr":
            out = render(cmd_required_snr(cfg, args.threads), SNR_COLUMNS, args.format)
        else:
            out = render(cmd_vectors(cfg), None, "json")
    except ConfigError as exc:
        print(f"error: {args.config}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - report and map to the runtime exit code
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2

    try:
        write_atomic(args.out, out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
