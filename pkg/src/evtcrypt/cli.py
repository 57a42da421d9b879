# pyre-strict
"""Command-line interface: ``evtcrypt <command> ...``.

Every command prints one JSON object on stdout; logs go to stderr. Output files
are staged and only written, each through a temporary sibling, once the command
has succeeded.
"""

import argparse
import getpass
import json
import logging
import os
import sys
import tempfile
import time
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, NoReturn

from pydantic import BaseModel, Field, ValidationError

from evtcrypt.analysis.bench import bench_encrypt
from evtcrypt.analysis.frame import render_frame
from evtcrypt.analysis.metrics import SnrReport, snr
from evtcrypt.analysis.scenes import generate_scene
from evtcrypt.attacks.base import EventFilter
from evtcrypt.attacks.density import DensityFilter
from evtcrypt.attacks.noise import inject_random_noise, label_encrypted
from evtcrypt.attacks.nnf import NnfFilter
from evtcrypt.core.config import DensityConfig, EncryptConfig, NnfConfig
from evtcrypt.core.encryptor import decrypt, encrypt
from evtcrypt.core.errors import EvtCryptError, KeyFileError
from evtcrypt.core.events import EventStream, Resolution
from evtcrypt.formats import format_for
from evtcrypt.formats.keyfile import encode_key, read_key
from evtcrypt.formats.labels import LabeledStream, encode_labels, read_labels

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_KEY = 3

SECRET_ENV = "EVTCRYPT_SECRET"


class UsageError(Exception):
    """Bad command line or missing secret."""


class CommandResult(BaseModel):
    """Exit code plus the JSON summary printed on stdout."""

    exit_code: int = EXIT_OK
    summary: dict[str, Any] = Field(default_factory=dict)
    outputs: dict[str, bytes] = Field(default_factory=dict)

    def stage(self, path: str | Path, payload: bytes) -> None:
        self.outputs[str(path)] = payload

    def commit(self) -> None:
        """Write every staged file to a temporary sibling, then rename them all.

        Files replaced before a failed rename are restored from backups.
        """
        pending: list[tuple[str, Path]] = []
        try:
            for path, payload in self.outputs.items():
                target = Path(path)
                fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
                pending.append((tmp, target))
                with os.fdopen(fd, "wb") as f:
                    f.write(payload)
        except BaseException:
            for tmp, _ in pending:
                Path(tmp).unlink(missing_ok=True)
            raise
        committed: list[tuple[Path, str | None]] = []
        try:
            for tmp, target in pending:
                backup: str | None = None
                if target.exists():
                    fd, backup = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".bak")
                    os.close(fd)
                    os.replace(target, backup)
                committed.append((target, backup))
                os.replace(tmp, target)
        except BaseException:
            # undo the renames already done
            for target, backup in reversed(committed):
                if backup is None:
                    target.unlink(missing_ok=True)
                else:
                    os.replace(backup, target)
            for tmp, _ in pending:
                Path(tmp).unlink(missing_ok=True)
            raise
        for target, backup in committed:
            if backup is not None:
                Path(backup).unlink(missing_ok=True)
            logger.info("Wrote %s", target)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


def read_secret() -> int:
    """Secret from ``EVTCRYPT_SECRET``, else an interactive prompt."""
    raw = os.environ.get(SECRET_ENV)
    if raw is None:
        if not sys.stdin.isatty():
            raise UsageError(f"Set {SECRET_ENV} to provide the key secret")
        raw = getpass.getpass("Key secret: ")
    try:
        secret = int(raw.strip(), 0)
    except ValueError as e:
        raise UsageError(f"{SECRET_ENV} must be an integer, decimal or 0x-hex") from e
    if not 0 <= secret < 2**64:
        raise UsageError(f"{SECRET_ENV} must fit in 64 bits")
    return secret


def _read_stream(path: str, fmt: str | None) -> EventStream:
    return format_for(path, fmt).read(path)


def _stream_bytes(stream: EventStream, path: str, fmt: str | None) -> bytes:
    return format_for(path, fmt).dumps(stream)


def _labels_path(out: str, explicit: str | None) -> str:
    return explicit if explicit is not None else f"{out}.labels"


def _snr_fields(prefix: str, report: SnrReport) -> dict[str, Any]:
    return {
        f"{prefix}snr": None if report.infinite else report.ratio,
        f"{prefix}snr_infinite": report.infinite,
    }


def cmd_encrypt(args: argparse.Namespace) -> CommandResult:
    cfg = EncryptConfig(
        sigma=args.sigma,
        spatial_threshold=args.tx,
        t_threshold=args.tt,
        seed=args.seed,
        mask_mode=args.mask,
        band_radius=args.band_radius,
        region=tuple(args.region) if args.region else None,
        audit=args.audit,
    )
    stream = _read_stream(args.input, args.format)
    secret = read_secret()
    start = time.perf_counter()
    bundle = encrypt(stream, cfg)
    elapsed = (time.perf_counter() - start) * 1e3

    result = CommandResult()
    result.stage(args.output, _stream_bytes(bundle.stream, args.output, args.format))
    result.stage(args.key, encode_key(bundle.plane, secret).to_bytes())
    result.summary = {
        "input_events": bundle.stats.input_events,
        "output_events": bundle.stats.output_events,
        "mask_pixels": bundle.stats.mask_pixels,
        "noise_events": bundle.stats.noise_events,
        "unreached_pixels": bundle.stats.unreached_pixels,
        "saturated_pixels": bundle.stats.saturated_pixels,
        "elapsed_ms": round(elapsed, 3),
    }
    return result


def cmd_decrypt(args: argparse.Namespace) -> CommandResult:
    stream = _read_stream(args.input, args.format)
    secret = read_secret()
    plane = read_key(args.key, secret)
    recovered = decrypt(stream, plane)

    result = CommandResult()
    result.stage(args.output, _stream_bytes(recovered, args.output, args.format))
    result.summary = {"input_events": len(stream), "output_events": len(recovered)}
    return result


def _build_filter(args: argparse.Namespace) -> EventFilter:
    if args.filter == "nnf":
        cfg = NnfConfig(
            t_space=args.t_space, t_time=args.t_time, min_neighbors=args.min_neighbors
        )
        return NnfFilter(config=cfg, method=args.method)
    dx, dy, dt = args.voxel
    return DensityFilter(config=DensityConfig(dx=dx, dy=dy, dt=dt, min_count=args.min_count))


def cmd_attack(args: argparse.Namespace) -> CommandResult:
    stream = _read_stream(args.input, args.format)
    event_filter = _build_filter(args)
    result = CommandResult()
    if args.labels is None:
        filtered = event_filter.apply(stream)
        result.summary = {"input_events": len(stream), "output_events": len(filtered)}
    else:
        labeled = LabeledStream(stream=stream, labels=read_labels(args.labels))
        kept = event_filter.apply_labeled(labeled)
        filtered = kept.stream
        result.summary = {
            "input_events": len(stream),
            "output_events": len(filtered),
            **_snr_fields("pre_", snr(labeled)),
            **_snr_fields("post_", snr(kept)),
        }
        result.stage(_labels_path(args.output, args.labels_out), encode_labels(kept.labels))
    result.summary["filter"] = args.filter
    result.stage(args.output, _stream_bytes(filtered, args.output, args.format))
    return result


def cmd_frame(args: argparse.Namespace) -> CommandResult:
    stream = _read_stream(args.input, args.format)
    t_lo, t_hi = stream.time_range()
    window = (
        args.t0 if args.t0 is not None else t_lo,
        args.t1 if args.t1 is not None else t_hi,
    )
    frame = render_frame(stream, window, mode=args.mode)
    result = CommandResult()
    result.stage(args.output, frame.to_pgm())
    if args.html:
        fig = frame.to_figure(title=Path(args.input).name)
        result.stage(args.html, fig.to_html(include_plotlyjs="cdn").encode())
    result.summary = {
        "width": frame.width,
        "height": frame.height,
        "t0": window[0],
        "t1": window[1],
        "mode": frame.mode,
    }
    return result


def cmd_snr(args: argparse.Namespace) -> CommandResult:
    stream = _read_stream(args.input, args.format)
    report = snr(LabeledStream(stream=stream, labels=read_labels(args.labels)))
    return CommandResult(
        summary={
            "signal": report.signal,
            "noise": report.noise,
            "scale": report.scale,
            **_snr_fields("", report),
        }
    )


def cmd_inject(args: argparse.Namespace) -> CommandResult:
    stream = _read_stream(args.input, args.format)
    labeled = inject_random_noise(stream, args.snr, args.seed)
    result = CommandResult()
    result.stage(args.output, _stream_bytes(labeled.stream, args.output, args.format))
    result.stage(_labels_path(args.output, args.labels_out), encode_labels(labeled.labels))
    result.summary = {
        "input_events": len(stream),
        "output_events": len(labeled.stream),
        "noise_events": labeled.noise_count,
    }
    return result


def cmd_gen(args: argparse.Namespace) -> CommandResult:
    resolution = Resolution(width=args.width, height=args.height)
    scene = generate_scene(
        args.kind, resolution, args.duration, args.rate, args.seed, bar_width=args.bar_width
    )
    result = CommandResult()
    result.stage(args.output, _stream_bytes(scene.stream, args.output, args.format))
    if args.labels_out:
        result.stage(args.labels_out, encode_labels(scene.labels))
    result.summary = {"kind": args.kind, "output_events": len(scene.stream)}
    return result


def cmd_label(args: argparse.Namespace) -> CommandResult:
    original = _read_stream(args.original, args.format)
    encrypted = _read_stream(args.encrypted, args.format)
    labeled = label_encrypted(original, encrypted)
    result = CommandResult()
    result.stage(args.output, encode_labels(labeled.labels))
    result.summary = {"signal": labeled.signal_count, "noise": labeled.noise_count}
    return result


def cmd_bench(args: argparse.Namespace) -> CommandResult:
    report = bench_encrypt(
        Resolution(width=args.width, height=args.height), args.count, args.trials, seed=args.seed
    )
    return CommandResult(summary=report.model_dump())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evtcrypt", description="Event stream encryption toolkit")
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default="WARNING",
        help="Logging level on stderr",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Shortcut for --log-level INFO")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(
        name: str, handler: Callable[[argparse.Namespace], CommandResult], summary: str
    ) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=summary)
        p.add_argument("--format", choices=["text", "binary"], default=None,
                       help="Event file format (default: by file suffix)")
        p.set_defaults(handler=handler)
        return p

    p = add("encrypt", cmd_encrypt, "Encrypt an event stream and write its key")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("key")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--tx", type=int, default=1, help="Spatial threshold T_x (inclusive)")
    p.add_argument("--tt", type=int, default=None, help="Absolute temporal threshold T_t in µs")
    p.add_argument("--mask", choices=["full", "band", "region"], default="full")
    p.add_argument("--band-radius", type=int, default=1)
    p.add_argument("--region", type=int, nargs=4, metavar=("X0", "Y0", "X1", "Y1"))
    p.add_argument("--audit", action="store_true", help="Check every noise batch while encrypting")

    p = add("decrypt", cmd_decrypt, "Recover the original stream with a key")
    p.add_argument("input")
    p.add_argument("key")
    p.add_argument("output")

    p = add("attack", cmd_attack, "Run a denoising filter")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--filter", choices=["nnf", "density"], default="nnf")
    p.add_argument("--t-space", type=int, default=2)
    p.add_argument("--t-time", type=int, default=5000)
    p.add_argument("--min-neighbors", type=int, default=1)
    p.add_argument("--method", choices=["indexed", "naive"], default="indexed")
    p.add_argument("--voxel", type=int, nargs=3, default=[2, 2, 10000], metavar=("DX", "DY", "DT"))
    p.add_argument("--min-count", type=int, default=2)
    p.add_argument("--labels", default=None, help="Ground-truth labels; enables SNR output")
    p.add_argument("--labels-out", default=None)

    p = add("frame", cmd_frame, "Render an event frame as PGM")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--t0", type=int, default=None)
    p.add_argument("--t1", type=int, default=None)
    p.add_argument("--mode", choices=["accumulate", "count"], default="accumulate")
    p.add_argument("--html", default=None, help="Also write a plotly HTML view")

    p = add("snr", cmd_snr, "Score a labeled stream")
    p.add_argument("input")
    p.add_argument("labels")

    p = add("inject", cmd_inject, "Add uncorrelated random noise")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--snr", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--labels-out", default=None)

    p = add("gen", cmd_gen, "Generate a synthetic scene")
    p.add_argument("kind", choices=["edge-sweep", "two-blobs"])
    p.add_argument("output")
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--height", type=int, default=48)
    p.add_argument("--duration", type=int, default=1_000_000)
    p.add_argument("--rate", type=float, default=50_000.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bar-width", type=int, default=2)
    p.add_argument("--labels-out", default=None)

    p = add("label", cmd_label, "Label an encrypted stream against its original")
    p.add_argument("original")
    p.add_argument("encrypted")
    p.add_argument("output")

    p = add("bench", cmd_bench, "Measure encryption throughput")
    p.add_argument("--width", type=int, default=346)
    p.add_argument("--height", type=int, default=260)
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    return parser


def run(argv: Sequence[str] | None = None) -> CommandResult:
    """Parse and execute one command, mapping errors to exit codes."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        logger.error("%s", e)
        return CommandResult(exit_code=EXIT_USAGE, summary={"error": str(e)})

    level = "INFO" if args.verbose else args.log_level
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        result = args.handler(args)
        result.commit()
    except (UsageError, ValidationError) as e:
        code, err = EXIT_USAGE, e
    except KeyFileError as e:
        code, err = EXIT_KEY, e
    except (EvtCryptError, OSError) as e:
        code, err = EXIT_DATA, e
    else:
        result.summary = {"command": args.command, **result.summary}
        return result
    logger.error("%s: %s", type(err).__name__, err)
    return CommandResult(exit_code=code, summary={"command": args.command, "error": str(err)})


def main(argv: Sequence[str] | None = None) -> int:
    result = run(argv)
    print(json.dumps(result.summary, sort_keys=True, default=str))
    return result.exit_code
