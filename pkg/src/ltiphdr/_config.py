"""Run configuration: built-in defaults, an optional key=value file, then CLI flags."""

from __future__ import annotations

import dataclasses
import logging
import pathlib
import typing

from ltiphdr._algebra import create_algebra
from ltiphdr._errors import ConfigError, ExposureTimeError
from ltiphdr._fusion import FusionConfig
from ltiphdr._metrics import NaturalnessParams, QualityWeights
from ltiphdr._util import exposure_time_from_name, parse_exposure_times
from ltiphdr._weights import WeightParams

__all__ = [
    "CONFIG_KEYS",
    "RunConfig",
    "parse_config",
    "read_config",
]

logger = logging.getLogger(__name__)

Settings = typing.Dict[str, typing.Any]


def _boolean(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _levels(text: str) -> int | None:
    return None if text.strip().lower() == "auto" else int(text)


def _choice(*choices: str) -> typing.Callable[[str], str]:
    def parse(text: str) -> str:
        value = text.strip().lower()
        if value not in choices:
            raise ValueError(f"{text!r} is not one of {', '.join(choices)}")
        return value

    return parse


CONFIG_KEYS: dict[str, typing.Callable[[str], typing.Any]] = {
    "model": _choice("ltip", "lip", "parametric", "real"),
    "m": float,
    "mode": _choice("flat", "pyramid"),
    "levels": _levels,
    "mu": float,
    "sigma2": float,
    "wc": float,
    "ws": float,
    "we": float,
    "lut": _boolean,
    "lut_resolution": int,
    "workers": int,
    "a": float,
    "alpha": float,
    "beta": float,
    "mean_center": float,
    "mean_spread": float,
    "std_center": float,
    "std_spread": float,
}

_DEFAULTS: Settings = {
    "model": "ltip",
    "m": 1.0,
    "mode": "pyramid",
    "levels": None,
    "mu": 0.37,
    "sigma2": 0.2,
    "wc": 1.0,
    "ws": 1.0,
    "we": 1.0,
    "lut": False,
    "lut_resolution": 65536,
    "workers": 1,
    "a": 0.8012,
    "alpha": 0.3046,
    "beta": 0.7088,
    "mean_center": 0.5,
    "mean_spread": 0.2,
    "std_center": 0.25,
    "std_spread": 0.1,
}


def parse_config(text: str) -> Settings:
    """Parse flat ``key = value`` text.

    Blank lines and ``#`` comments are ignored; a later key overrides an earlier one.

    Raises
    ------
    ConfigError
        On a line without ``=``, an unknown key or an unparsable value.
    """
    settings: Settings = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        if not sep:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {line!r}")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            settings[key] = CONFIG_KEYS[key](value.strip())
        except ValueError as e:
            raise ConfigError(f"line {lineno}: invalid value for {key!r}: {e}") from None
    return settings


def read_config(path: str | pathlib.Path) -> Settings:
    """Read a config file with :func:`parse_config`."""
    try:
        text = pathlib.Path(path).read_text()
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e
    return parse_config(text)


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Everything one command needs, fully resolved.

    Parameters
    ----------
    fusion : FusionConfig
        Algebra, mode, levels, weights, LUT and worker settings.
    quality : QualityWeights
        Coefficients of the overall quality score.
    naturalness : NaturalnessParams
        Naturalness Gaussians.
    inputs : tuple of pathlib.Path
        Input frames in bracket order.
    times_file : pathlib.Path, optional
        Exposure metadata file, one time per line.
    times_pattern : str, optional
        Regular expression extracting the time from each file name.
    output : pathlib.Path, optional
        Where the main artifact is written.
    report : pathlib.Path, optional
        Where the JSON report is written.
    """

    fusion: FusionConfig = FusionConfig()
    quality: QualityWeights = QualityWeights()
    naturalness: NaturalnessParams = NaturalnessParams()
    inputs: tuple[pathlib.Path, ...] = ()
    times_file: pathlib.Path | None = None
    times_pattern: str | None = None
    output: pathlib.Path | None = None
    report: pathlib.Path | None = None

    def __post_init__(self) -> None:
        if self.times_file is not None and self.times_pattern is not None:
            raise ConfigError("Give exposure times as a file or a pattern, not both")

    @classmethod
    def resolve(
        cls,
        config_file: str | pathlib.Path | None = None,
        overrides: typing.Mapping[str, typing.Any] | None = None,
        **paths: typing.Any,
    ) -> RunConfig:
        """Layer defaults, an optional config file and explicit overrides.

        Parameters
        ----------
        config_file : path, optional
            A ``key = value`` file.
        overrides : mapping, optional
            Already-typed values, usually CLI flags; ``None`` values are skipped.
        **paths
            ``inputs``, ``times_file``, ``times_pattern``, ``output`` and ``report``.

        Raises
        ------
        ConfigError
            If a key is unknown or a value is invalid.
        """
        settings = dict(_DEFAULTS)
        if config_file is not None:
            settings.update(read_config(config_file))
        for key, value in (overrides or {}).items():
            if key not in CONFIG_KEYS:
                raise ConfigError(f"unknown key {key!r}")
            if value is not None:
                settings[key] = value
        try:
            config = cls.from_settings(settings, **paths)
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(str(e)) from e
        logger.debug("resolved settings %s", settings)
        return config

    @classmethod
    def from_settings(cls, settings: Settings, **paths: typing.Any) -> RunConfig:
        """Build from a complete settings mapping as produced by :meth:`resolve`."""
        model = settings["model"]
        if model != "parametric" and settings["m"] != 1.0:
            logger.warning("model %r ignores m=%g", model, settings["m"])
        algebra = create_algebra(model, m=settings["m"])
        weights = WeightParams(
            wc_exponent=settings["wc"],
            ws_exponent=settings["ws"],
            we_exponent=settings["we"],
            mu=settings["mu"],
            sigma2=settings["sigma2"],
        )
        fusion = FusionConfig(
            algebra=algebra,
            mode=settings["mode"],
            levels=None if settings["levels"] == "auto" else settings["levels"],
            weight_params=weights,
            use_lut=settings["lut"],
            lut_resolution=settings["lut_resolution"],
            workers=settings["workers"],
        )
        quality = QualityWeights(settings["a"], settings["alpha"], settings["beta"])
        naturalness = NaturalnessParams(
            settings["mean_center"],
            settings["mean_spread"],
            settings["std_center"],
            settings["std_spread"],
        )

        def path_or_none(key: str) -> pathlib.Path | None:
            value = paths.get(key)
            return None if value is None else pathlib.Path(value)

        return cls(
            fusion=fusion,
            quality=quality,
            naturalness=naturalness,
            inputs=tuple(pathlib.Path(p) for p in paths.get("inputs") or ()),
            times_file=path_or_none("times_file"),
            times_pattern=paths.get("times_pattern"),
            output=path_or_none("output"),
            report=path_or_none("report"),
        )

    def exposure_times(self, paths: typing.Sequence[pathlib.Path]) -> list[float] | None:
        """Exposure times for the given frames, or ``None`` when no source is set.

        Raises
        ------
        ExposureTimeError
            If the source is unreadable, a time is invalid, or the count differs
            from the number of frames.
        """
        if self.times_file is not None:
            try:
                times = parse_exposure_times(self.times_file.read_text())
            except OSError as e:
                raise ExposureTimeError(f"Cannot read {self.times_file}: {e}") from e
        elif self.times_pattern is not None:
            times = [exposure_time_from_name(p, self.times_pattern) for p in paths]
        else:
            return None
        if len(times) != len(paths):
            raise ExposureTimeError(
                f"{len(times)} exposure time(s) given for {len(paths)} frame(s)"
            )
        return times

    def params(self) -> dict[str, typing.Any]:
        """The fully resolved parameters, as echoed in reports."""
        return {
            **self.fusion.to_dict(),
            **self.quality.to_dict(),
            **self.naturalness.to_dict(),
        }
