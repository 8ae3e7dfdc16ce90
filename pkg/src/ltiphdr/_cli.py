"""Command line tool of ltiphdr."""

from __future__ import annotations

import dataclasses
import json
import logging
import pathlib
import typing

import click

import ltiphdr
from ltiphdr._algebra import REAL
from ltiphdr._config import CONFIG_KEYS, RunConfig
from ltiphdr._crf import compare_crf, load_dorf
from ltiphdr._errors import ExposureTimeError, ImageIOError, LtipError
from ltiphdr._fusion import fuse
from ltiphdr._image import ExposedFrame
from ltiphdr._io import (
    decode_frames,
    encode_image,
    expand_inputs,
    read_image,
    read_pfm,
    write_pfm,
)
from ltiphdr._irradiance import (
    IrradianceMap,
    merge_irradiance,
    recover_irradiance,
    tonemap_ltip,
    verify_equivalence,
)
from ltiphdr._lut import LutTransform
from ltiphdr._metrics import assess_quality
from ltiphdr._parallel import TilePool
from ltiphdr._synthetic import DEFAULT_EXPOSURES, synthetic_bracket, synthetic_scene
from ltiphdr._util import ExposureTime, file_digest, serialize_exposure_times
from ltiphdr._weights import compute_weights

__all__ = ["main"]

logger = logging.getLogger(__name__)

F = typing.TypeVar("F", bound=typing.Callable[..., typing.Any])

_FILE = click.Path(exists=True, dir_okay=False, path_type=pathlib.Path)
_OUT = click.Path(dir_okay=False, writable=True, path_type=pathlib.Path)


class InputError(click.ClickException):
    """Bad input: unreadable files, invalid parameters or values."""

    exit_code = 1


class VerificationFailed(click.ClickException):
    """A check ran and its tolerance was exceeded."""

    exit_code = 2


class InternalError(click.ClickException):
    exit_code = 3


class _Group(click.Group):
    # usage errors exit 1, library errors 1, unexpected errors 3
    def make_context(
        self,
        info_name: str | None,
        args: list[str],
        parent: click.Context | None = None,
        **extra: typing.Any,
    ) -> click.Context:
        try:
            return super().make_context(info_name, args, parent, **extra)
        except click.UsageError as e:
            e.exit_code = 1
            raise

    def invoke(self, ctx: click.Context) -> typing.Any:
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = 1
            raise
        except (click.ClickException, click.exceptions.Exit, click.Abort):
            raise
        except LtipError as e:
            raise InputError(str(e)) from e
        except Exception as e:
            logger.debug("internal error", exc_info=True)
            raise InternalError(f"internal error: {type(e).__name__}: {e}") from e


class _Levels(click.ParamType):
    name = "auto|n"

    def convert(
        self, value: typing.Any, param: click.Parameter | None, ctx: click.Context | None
    ) -> int | str:
        if value == "auto" or isinstance(value, int):
            return typing.cast("int | str", value)
        try:
            levels = int(value)
        except ValueError:
            self.fail(f"{value!r} is neither 'auto' nor an integer", param, ctx)
        if levels < 1:
            self.fail(f"{levels} must be >= 1", param, ctx)
        return levels


class _FloatList(click.ParamType):
    name = "f,f,..."

    def convert(
        self, value: typing.Any, param: click.Parameter | None, ctx: click.Context | None
    ) -> list[float]:
        if isinstance(value, list):
            return value
        try:
            return [float(v) for v in str(value).split(",") if v.strip()]
        except ValueError:
            self.fail(f"{value!r} is not a comma-separated list of numbers", param, ctx)


class _TimesList(click.ParamType):
    name = "t,t,..."

    def convert(
        self, value: typing.Any, param: click.Parameter | None, ctx: click.Context | None
    ) -> list[float]:
        if isinstance(value, list):
            return value
        try:
            return [ExposureTime.parse(v).seconds for v in str(value).split(",")]
        except ExposureTimeError as e:
            self.fail(str(e), param, ctx)


def _apply(options: list[typing.Callable[[F], F]]) -> typing.Callable[[F], F]:
    def decorator(func: F) -> F:
        for option in reversed(options):
            func = option(func)
        return func

    return decorator


input_options = _apply(
    [
        click.option(
            "--in",
            "inputs",
            multiple=True,
            required=True,
            type=click.Path(exists=True, path_type=pathlib.Path),
            help="Input frames or directories of frames, in bracket order.",
        ),
        click.option(
            "--times",
            "times_file",
            type=_FILE,
            help="Exposure times file, one time per line in frame order.",
        ),
        click.option(
            "--times-pattern",
            help="Regular expression with one group capturing the time in file names.",
        ),
    ]
)

fusion_options = _apply(
    [
        click.option(
            "--model",
            type=click.Choice(["ltip", "lip", "parametric", "real"]),
            help="Image algebra.  [default: ltip]",
        ),
        click.option("--m", "m", type=float, help="Exponent of the parametric model."),
        click.option(
            "--mode",
            type=click.Choice(["pyramid", "flat"]),
            help="Multiresolution or single-level blending.  [default: pyramid]",
        ),
        click.option("--levels", type=_Levels(), help="Pyramid levels.  [default: auto]"),
        click.option("--mu", type=float, help="Well-exposedness center."),
        click.option("--sigma2", type=float, help="Well-exposedness variance."),
        click.option("--wc", type=float, help="Contrast weight exponent."),
        click.option("--ws", type=float, help="Saturation weight exponent."),
        click.option("--we", type=float, help="Well-exposedness weight exponent."),
        click.option(
            "--lut/--no-lut",
            default=None,
            help="Evaluate the generative function through look-up tables.",
        ),
        click.option("--lut-resolution", type=int, help="Intervals per look-up table."),
        click.option("--workers", type=int, help="Worker threads."),
        click.option(
            "--config",
            "config_file",
            type=_FILE,
            help="A key = value file; command-line options override it.",
        ),
    ]
)

quality_options = _apply(
    [
        click.option("--a", "a", type=float, help="Weight of structural fidelity."),
        click.option("--alpha", type=float, help="Exponent of structural fidelity."),
        click.option("--beta", type=float, help="Exponent of naturalness."),
        click.option("--mean-center", type=float),
        click.option("--mean-spread", type=float),
        click.option("--std-center", type=float),
        click.option("--std-spread", type=float),
    ]
)


def _resolve(options: dict[str, typing.Any], **paths: typing.Any) -> RunConfig:
    overrides = {k: options.get(k) for k in CONFIG_KEYS}
    return RunConfig.resolve(options.get("config_file"), overrides, **paths)


def _digests(paths: typing.Iterable[pathlib.Path | None]) -> dict[str, str]:
    return {str(p): file_digest(p) for p in paths if p is not None}


def _emit_report(payload: dict[str, typing.Any], path: pathlib.Path | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        click.echo(text, nl=False)
        return
    try:
        path.write_text(text)
    except OSError as e:
        raise ImageIOError(f"Cannot write report {path}: {e}") from e
    logger.info("wrote report %s", path)


def _decode(config: RunConfig) -> tuple[list[pathlib.Path], list[ExposedFrame]]:
    paths = expand_inputs(config.inputs)
    return paths, decode_frames(paths, config.exposure_times(paths))


def print_version(ctx: click.Context, _: click.Parameter, value: bool) -> None:
    """Print version information."""
    if not value or ctx.resilient_parsing:
        return
    click.echo("ltiphdr version " + ltiphdr.__version__)
    ctx.exit()


@click.group(cls=_Group)
@click.option(
    "--version",
    "-v",
    is_flag=True,
    callback=print_version,
    expose_value=False,
    is_eager=True,
)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="WARNING",
    show_default=True,
)
def main(log_level: str) -> None:
    """Exposure fusion and HDR tools in logarithmic-type image algebras."""
    logging.basicConfig(
        level=log_level.upper(), format="%(levelname)s %(name)s: %(message)s"
    )


@main.command("fuse")
@input_options
@click.option("--out", "output", required=True, type=_OUT, help="Output PNG or PFM.")
@fusion_options
@quality_options
@click.option("--baseline", type=_FILE, help="Baseline image to compare with.")
@click.option("--hdr", type=_FILE, help="PFM irradiance reference to score against.")
@click.option("--report", type=_OUT, help="Write a JSON report here.")
def fuse_command(**options: typing.Any) -> None:
    """Fuse an exposure bracket into one image.

    Exposure times are not needed; when given they are ignored.
    """
    config = _resolve(
        options,
        inputs=options["inputs"],
        times_file=options["times_file"],
        times_pattern=options["times_pattern"],
        output=options["output"],
        report=options["report"],
    )
    paths, frames = _decode(config)
    if config.times_file is not None or config.times_pattern is not None:
        logger.warning("exposure fusion ignores the exposure times")
    lut_info = None
    transform = config.fusion.transform()
    if isinstance(transform, LutTransform):
        lut_info = transform.info()
        for table in lut_info.values():
            logger.info(
                "%s LUT: resolution=%d, error=%.3e (bound %.3e)",
                table["function"],
                table["resolution"],
                table["max_abs_error"],
                table["bound"],
            )
    fused = fuse(frames, config=config.fusion)
    encode_image(fused, options["output"])

    baseline, hdr = options["baseline"], options["hdr"]
    if config.report is None and baseline is None and hdr is None:
        return
    payload: dict[str, typing.Any] = {
        "command": "fuse",
        "output": str(config.output),
        "params": config.params(),
        "inputs": _digests([*paths, baseline, hdr]),
    }
    if lut_info is not None:
        payload["lut"] = lut_info
    if baseline is not None or hdr is not None:
        quality = assess_quality(
            fused,
            hdr=IrradianceMap(read_pfm(hdr)) if hdr is not None else None,
            baseline=read_image(baseline) if baseline is not None else None,
            weights=config.quality,
            naturalness=config.naturalness,
        )
        payload["quality"] = quality.to_dict()
    _emit_report(payload, config.report)


@main.command("irradiance")
@input_options
@click.option("--out", "output", required=True, type=_OUT, help="Output PFM.")
@click.option("--tonemapped", type=_OUT, help="Also write the tone-mapped image here.")
@fusion_options
def irradiance_command(**options: typing.Any) -> None:
    """Merge a bracket into an irradiance map, written as PFM.

    Needs exposure times from --times or --times-pattern.
    """
    config = _resolve(
        options,
        inputs=options["inputs"],
        times_file=options["times_file"],
        times_pattern=options["times_pattern"],
        output=options["output"],
    )
    if config.times_file is None and config.times_pattern is None:
        raise ExposureTimeError("irradiance needs --times or --times-pattern")
    _, frames = _decode(config)
    algebra = config.fusion.algebra
    with TilePool(config.fusion.workers) as pool:
        images = [f.image for f in frames]
        stack = compute_weights(images, config.fusion.weight_params, pool)
    merged = merge_irradiance([recover_irradiance(f, algebra) for f in frames], stack)
    write_pfm(options["output"], merged.values)
    logger.info("wrote %s", options["output"])
    if options["tonemapped"] is not None:
        encode_image(tonemap_ltip(merged, algebra), options["tonemapped"])


@main.command("verify")
@input_options
@click.option(
    "--tol",
    default=1e-8,
    show_default=True,
    type=float,
    help="Largest allowed difference.",
)
@fusion_options
@click.option("--report", type=_OUT, help="Write a JSON report here.")
def verify_command(tol: float, **options: typing.Any) -> None:
    """Check that fusing in the algebra equals merging irradiance and tone mapping.

    All frames must share one exposure time. Exits with status 2 when the difference
    exceeds the tolerance.
    """
    config = _resolve(
        options,
        inputs=options["inputs"],
        times_file=options["times_file"],
        times_pattern=options["times_pattern"],
        report=options["report"],
    )
    paths, frames = _decode(config)
    result = verify_equivalence(frames, config.fusion)
    passed = result.max_diff <= tol
    if config.report is not None:
        payload = {
            "command": "verify",
            **result.to_dict(),
            "tol": tol,
            "passed": passed,
            "params": config.params(),
            "inputs": _digests(paths),
        }
        _emit_report(payload, config.report)
    click.echo(f"max difference {result.max_diff:.3e} ({'pass' if passed else 'FAIL'})")
    if not passed:
        raise VerificationFailed(
            f"max difference {result.max_diff:.3e} exceeds tolerance {tol:.3e}"
        )


@main.command("metrics")
@click.option("--test", "test", required=True, type=_FILE, help="Image to score.")
@click.option("--baseline", type=_FILE, help="Baseline image to compare with.")
@click.option("--hdr", type=_FILE, help="PFM irradiance reference.")
@click.option("--window", default=11, show_default=True, type=int, help="SSIM window.")
@click.option(
    "--config",
    "config_file",
    type=_FILE,
    help="A key = value file; command-line options override it.",
)
@quality_options
@click.option("--report", type=_OUT, help="Write the JSON report here, not stdout.")
def metrics_command(
    test: pathlib.Path,
    baseline: pathlib.Path | None,
    hdr: pathlib.Path | None,
    window: int,
    **options: typing.Any,
) -> None:
    """Score an image against a baseline image and/or an HDR reference."""
    if baseline is None and hdr is None:
        raise click.UsageError("Give --baseline, --hdr or both")
    config = _resolve(options, report=options["report"])
    quality = assess_quality(
        read_image(test),
        hdr=IrradianceMap(read_pfm(hdr)) if hdr is not None else None,
        baseline=read_image(baseline) if baseline is not None else None,
        weights=config.quality,
        naturalness=config.naturalness,
        window=window,
    )
    payload = {
        "command": "metrics",
        **quality.to_dict(),
        "inputs": _digests([test, baseline, hdr]),
    }
    _emit_report(payload, config.report)


@main.command("crf")
@click.option("--dorf", required=True, type=_FILE, help="Response curves, DoRF text.")
@click.option(
    "--model",
    type=click.Choice(["ltip", "lip", "parametric", "real"]),
    help="Image algebra.  [default: ltip]",
)
@click.option("--m", "m", type=float, help="Exponent of the parametric model.")
@click.option("--workers", type=int, help="Worker threads.")
@click.option("--report", type=_OUT, help="Write the JSON report here, not stdout.")
def crf_command(dorf: pathlib.Path, **options: typing.Any) -> None:
    """Fit the inverse generative function to measured camera response curves."""
    config = _resolve(options, report=options["report"])
    curves = load_dorf(dorf)
    with TilePool(config.fusion.workers) as pool:
        report = compare_crf(curves, config.fusion.algebra, pool)
    payload = {"command": "crf", **report.to_dict(), "inputs": _digests([dorf])}
    _emit_report(payload, config.report)
    if config.report is not None:
        best = report.best
        click.echo(f"best match {best.name!r}: k={best.gain:.6g} rmse={best.rmse:.3e}")


@main.command("synth")
@click.option(
    "--out",
    "output",
    required=True,
    type=click.Path(file_okay=False, path_type=pathlib.Path),
    help="Directory for the frames, the times file and the radiance map.",
)
@click.option(
    "--exposures",
    type=_TimesList(),
    default=",".join(map(str, DEFAULT_EXPOSURES)),
    show_default=True,
    help="Exposure times, comma separated.",
)
@click.option("--height", default=64, show_default=True, type=click.IntRange(min=2))
@click.option("--width", default=64, show_default=True, type=click.IntRange(min=2))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option(
    "--model",
    type=click.Choice(["ltip", "lip", "parametric", "real"]),
    help="Algebra whose inverse generative function is the camera response.",
)
@click.option("--m", "m", type=float, help="Exponent of the parametric model.")
def synth_command(
    output: pathlib.Path,
    exposures: list[float],
    height: int,
    width: int,
    seed: int,
    **options: typing.Any,
) -> None:
    """Render a synthetic bracket of a known scene."""
    config = _resolve(options)
    scene = synthetic_scene(height, width, seed)
    frames = synthetic_bracket(scene, exposures, config.fusion.algebra)
    try:
        output.mkdir(parents=True, exist_ok=True)
        (output / "times.txt").write_text(serialize_exposure_times(exposures))
    except OSError as e:
        raise ImageIOError(f"Cannot write to {output}: {e}") from e
    for i, frame in enumerate(frames):
        encode_image(frame.image, output / f"frame_{i:02d}.png")
    write_pfm(output / "scene.pfm", scene.values)
    click.echo(f"wrote {len(frames)} frames to {output}")


@main.command("sweep")
@input_options
@click.option(
    "--out",
    "output",
    required=True,
    type=click.Path(file_okay=False, path_type=pathlib.Path),
    help="Directory for one image per value and sweep.json.",
)
@click.option(
    "--param",
    type=click.Choice(["m", "mu", "sigma2"]),
    default="m",
    show_default=True,
    help="The parameter to sweep.",
)
@click.option(
    "--values",
    type=_FloatList(),
    default="0.5,0.75,1,1.33,2",
    show_default=True,
    help="Values of the parameter, comma separated.",
)
@fusion_options
@quality_options
def sweep_command(
    output: pathlib.Path, param: str, values: list[float], **options: typing.Any
) -> None:
    """Fuse one bracket for several values of a parameter.

    Each result is compared with fusion in real arithmetic under the same weights.
    Sweeping ``m`` selects the parametric model.
    """
    if param == "m" and options.get("model") not in (None, "parametric"):
        logger.warning("sweeping m uses the parametric model, not %r", options["model"])
    if param == "m":
        options["model"] = "parametric"
    config = _resolve(
        options,
        inputs=options["inputs"],
        times_file=options["times_file"],
        times_pattern=options["times_pattern"],
    )
    paths, frames = _decode(config)
    baseline = fuse(frames, config=dataclasses.replace(config.fusion, algebra=REAL))
    try:
        output.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ImageIOError(f"Cannot create {output}: {e}") from e

    rows = []
    for value in values:
        run = _resolve({**options, param: value})
        fused = fuse(frames, config=run.fusion)
        name = f"{param}_{value:g}.png"
        encode_image(fused, output / name)
        quality = assess_quality(
            fused, baseline=baseline, weights=run.quality, naturalness=run.naturalness
        ).to_dict()
        del quality["params"]
        rows.append({"value": value, "file": name, **quality})
        logger.info("%s=%g: rmse=%.4g", param, value, quality["rmse"])

    payload = {
        "command": "sweep",
        "param": param,
        "rows": rows,
        "params": config.params(),
        "inputs": _digests(paths),
    }
    _emit_report(payload, output / "sweep.json")
    best = max(rows, key=lambda row: row["n"])
    click.echo(f"most natural: {param}={best['value']:g} (n={best['n']:.4f})")
