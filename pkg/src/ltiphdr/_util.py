from __future__ import annotations

import dataclasses
import hashlib
import mimetypes
import pathlib
import re
import typing

from ltiphdr._errors import ExposureTimeError

_EXPOSURE_RE = re.compile(r"^(\d+(?:\.\d*)?(?:e[+-]?\d+)?|\.\d+)(?:/(\d+(?:\.\d*)?))?$")

_MEDIA_TYPES = {
    ".pfm": "image/x-portable-floatmap",
}


def md5(data: str | bytes) -> str:
    """Generate a unique identifier for a string or bytes.

    Parameters
    ----------
    data : str | bytes
        The data to hash.

    Returns
    -------
    str :
        The hex digest.
    """
    if isinstance(data, str):
        data = data.encode()
    return hashlib.md5(data).hexdigest()


def file_digest(path: str | pathlib.Path) -> str:
    """The md5 hex digest of a file's contents, for report provenance."""
    return md5(pathlib.Path(path).read_bytes())


def read_file_byte_range(path: pathlib.Path, start: int, end: int) -> bytes:
    with path.open("rb") as file:
        file.seek(start)
        return file.read(end - start)


@dataclasses.dataclass(frozen=True)
class ExposureTime:
    """An exposure time in seconds."""

    seconds: float

    def __post_init__(self) -> None:
        if not (self.seconds > 0 and self.seconds < float("inf")):
            raise ExposureTimeError(
                f"Invalid exposure time {self.seconds!r}. Must be positive and finite"
            )

    @classmethod
    def parse(cls, text: str) -> ExposureTime:
        """Parse a decimal or photographic fraction into an exposure time.

        Parameters
        ----------
        text : str
            A value like ``"0.25"``, ``"2"`` or ``"1/250"``.

        Returns
        -------
        ExposureTime
            The parsed time.

        Raises
        ------
        ExposureTimeError
            If the text is not a positive decimal or fraction.
        """
        match = _EXPOSURE_RE.match(text.strip().lower())

        if not match:
            raise ExposureTimeError(
                f"Invalid exposure time {text!r}. Must be of the form '0.25' or '1/250'."
            )

        numerator, denominator = match.groups()
        seconds = float(numerator)
        if denominator is not None:
            if float(denominator) == 0:
                raise ExposureTimeError(f"Invalid exposure time {text!r}. Zero divisor")
            seconds /= float(denominator)
        return cls(seconds)

    def serialize(self) -> str:
        """Shortest text that parses back to the same value."""
        return repr(self.seconds)


def parse_exposure_times(text: str) -> list[float]:
    """Parse an exposure metadata file: one time per line, in frame order.

    Blank lines and ``#`` comments are ignored.
    """
    times = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            times.append(ExposureTime.parse(line).seconds)
        except ExposureTimeError as e:
            raise ExposureTimeError(f"line {lineno}: {e}") from None
    return times


def serialize_exposure_times(times: typing.Iterable[float]) -> str:
    """Serialize exposure times so that :func:`parse_exposure_times` inverts it."""
    return "".join(ExposureTime(float(t)).serialize() + "\n" for t in times)


def exposure_time_from_name(path: str | pathlib.Path, pattern: str) -> float:
    """Extract an exposure time from a file name.

    Parameters
    ----------
    path : str | pathlib.Path
        The file whose name holds the time.
    pattern : str
        A regular expression with one capture group matching the time, searched in
        the file name. An underscore is accepted as the fraction bar, so that
        ``"img_1_250.png"`` with pattern ``r"img_(\\d+_\\d+)"`` gives ``1/250``.

    Raises
    ------
    ExposureTimeError
        If the pattern does not match or captures an invalid time.
    """
    name = pathlib.Path(path).name
    match = re.search(pattern, name)
    if not match or match.re.groups != 1:
        raise ExposureTimeError(
            f"Pattern {pattern!r} must match {name!r} with exactly one capture group"
        )
    return ExposureTime.parse(match.group(1).replace("_", "/")).seconds


def guess_media_type(path: str | pathlib.Path) -> str:
    """Guess the media type of a file.

    Parameters
    ----------
    path : pathlib.Path
        The path to the file.

    Returns
    -------
    str
        The media type.
    """
    suffix = pathlib.Path(path).suffix.lower()
    if suffix in _MEDIA_TYPES:
        return _MEDIA_TYPES[suffix]
    return mimetypes.guess_type(str(path))[0] or "application/octet-stream"
