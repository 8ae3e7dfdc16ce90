"""Decoding and encoding of frames and irradiance maps."""

from __future__ import annotations

import logging
import pathlib
import typing

import numpy as np
import numpy.typing as npt
import png
from PIL import Image, UnidentifiedImageError

from ltiphdr._errors import ExposureTimeError, ImageIOError
from ltiphdr._image import ExposedFrame, codes_to_pixels, pixels_to_codes
from ltiphdr._util import guess_media_type, read_file_byte_range

__all__ = [
    "IMAGE_SUFFIXES",
    "decode_frames",
    "encode_image",
    "expand_inputs",
    "read_image",
    "read_pfm",
    "write_pfm",
]

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
PathLike = typing.Union[str, pathlib.Path]

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_JPEG_SIGNATURE = b"\xff\xd8\xff"


def _sniff(path: pathlib.Path) -> str:
    head = read_file_byte_range(path, 0, 8)
    if head.startswith(_PNG_SIGNATURE):
        return "image/png"
    if head.startswith(_JPEG_SIGNATURE):
        return "image/jpeg"
    if head[:3] in (b"PF\n", b"Pf\n"):
        return "image/x-portable-floatmap"
    return guess_media_type(path)


def _to_rgb(codes: npt.NDArray[typing.Any], alpha: bool) -> npt.NDArray[typing.Any]:
    if alpha:
        codes = codes[..., :-1]
    if codes.shape[-1] == 1:
        codes = np.repeat(codes, 3, axis=-1)
    return codes


def _read_png(path: pathlib.Path) -> FloatArray:
    try:
        width, height, rows, info = png.Reader(filename=str(path)).asDirect()
        codes = np.array([np.asarray(row, dtype=np.uint32) for row in rows])
    except png.Error as e:
        raise ImageIOError(f"Cannot decode PNG {path}: {e}") from e
    planes = int(info["planes"])
    codes = codes.reshape(height, width, planes)
    return codes_to_pixels(_to_rgb(codes, bool(info["alpha"])), int(info["bitdepth"]))


def _read_jpeg(path: pathlib.Path) -> FloatArray:
    try:
        with Image.open(path) as image:
            codes = np.asarray(image.convert("RGB"))
    except (UnidentifiedImageError, OSError) as e:
        raise ImageIOError(f"Cannot decode JPEG {path}: {e}") from e
    return codes_to_pixels(codes, 8)


def read_image(path: PathLike) -> FloatArray:
    """Decode a PNG or JPEG into ``(H, W, 3)`` pixels in ``[0, 1 - eps]``.

    Parameters
    ----------
    path : str or pathlib.Path
        An 8- or 16-bit PNG (gray, gray+alpha, RGB, RGBA or palette) or a JPEG.

    Returns
    -------
    numpy.ndarray
        Code ``v`` of bit depth ``b`` becomes ``v / (2**b - 1)``, clamped below 1.
        Alpha is dropped and gray is repeated into three channels.

    Raises
    ------
    ImageIOError
        If the file cannot be read or is not a supported format.
    """
    path = pathlib.Path(path)
    try:
        media_type = _sniff(path)
    except OSError as e:
        raise ImageIOError(f"Cannot read {path}: {e}") from e
    if media_type == "image/png":
        return _read_png(path)
    if media_type == "image/jpeg":
        return _read_jpeg(path)
    raise ImageIOError(f"Unsupported image format {media_type!r} for {path}")


def expand_inputs(inputs: typing.Iterable[PathLike]) -> list[pathlib.Path]:
    """Expand directories into their image files, sorted by name."""
    paths: list[pathlib.Path] = []
    for entry in map(pathlib.Path, inputs):
        if entry.is_dir():
            paths.extend(
                sorted(p for p in entry.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
            )
        else:
            paths.append(entry)
    if not paths:
        raise ImageIOError("No input images given")
    return paths


def decode_frames(
    paths: typing.Sequence[PathLike],
    exposure_times: typing.Sequence[float] | None = None,
) -> list[ExposedFrame]:
    """Decode a bracket of frames.

    Parameters
    ----------
    paths : sequence of path
        The frames in bracket order.
    exposure_times : sequence of float, optional
        One time per frame; 1 for every frame when omitted.

    Raises
    ------
    ImageIOError
        If a frame cannot be decoded or the frames differ in size.
    ExposureTimeError
        If the number of exposure times differs from the number of frames.
    """
    if exposure_times is not None and len(exposure_times) != len(paths):
        raise ExposureTimeError(
            f"{len(exposure_times)} exposure time(s) given for {len(paths)} frame(s)"
        )
    times = list(exposure_times) if exposure_times is not None else [1.0] * len(paths)
    frames = []
    for path, time in zip(paths, times):
        image = read_image(path)
        if frames and image.shape != frames[0].shape:
            raise ImageIOError(
                f"{path} is {image.shape[1]}x{image.shape[0]}, expected "
                f"{frames[0].shape[1]}x{frames[0].shape[0]} like {paths[0]}"
            )
        frames.append(ExposedFrame(image, time))
    logger.info("decoded %d frame(s)", len(frames))
    return frames


def write_pfm(path: PathLike, values: npt.ArrayLike) -> None:
    """Write a float raster as PFM, little-endian, bottom row first.

    ``(H, W, 3)`` arrays are written as color ``PF``; ``(H, W)`` or ``(H, W, 1)``
    arrays as grayscale ``Pf``.
    """
    data = np.asarray(values, dtype=np.float64)
    if data.ndim == 3 and data.shape[-1] == 1:
        data = data[..., 0]
    if data.ndim == 2:
        header = b"Pf"
    elif data.ndim == 3 and data.shape[-1] == 3:
        header = b"PF"
    else:
        raise ImageIOError(f"Cannot write an array of shape {data.shape} as PFM")
    height, width = data.shape[:2]
    body = np.ascontiguousarray(np.flipud(data), dtype="<f4").tobytes()
    try:
        with pathlib.Path(path).open("wb") as file:
            file.write(header + b"\n" + f"{width} {height}\n-1.0\n".encode())
            file.write(body)
    except OSError as e:
        raise ImageIOError(f"Cannot write {path}: {e}") from e


def read_pfm(path: PathLike) -> FloatArray:
    """Read a PFM file into ``(H, W, 3)`` or ``(H, W)`` float64 values.

    Raises
    ------
    ImageIOError
        If the file cannot be read or is not a well-formed PFM.
    """
    try:
        with pathlib.Path(path).open("rb") as file:
            kind = file.readline().strip()
            dims = file.readline().split()
            scale_line = file.readline().strip()
            body = file.read()
    except OSError as e:
        raise ImageIOError(f"Cannot read {path}: {e}") from e

    if kind not in (b"PF", b"Pf"):
        raise ImageIOError(f"{path}: not a PFM file")
    try:
        width, height = (int(d) for d in dims)
        scale = float(scale_line)
    except ValueError as e:
        raise ImageIOError(f"{path}: malformed PFM header") from e
    channels = 3 if kind == b"PF" else 1
    dtype = "<f4" if scale < 0 else ">f4"
    count = width * height * channels
    if len(body) < 4 * count:
        raise ImageIOError(f"{path}: truncated PFM data")
    data = np.frombuffer(body, dtype=dtype, count=count).astype(np.float64)
    data = np.flipud(data.reshape(height, width, channels))
    return np.ascontiguousarray(data[..., 0] if channels == 1 else data)


def encode_image(image: npt.ArrayLike, path: PathLike) -> None:
    """Persist an image: PFM for ``.pfm`` paths, otherwise an 8-bit PNG.

    PNG codes are ``floor(v * 255 + 0.5)``.

    Raises
    ------
    ImageIOError
        If the path cannot be written.
    """
    path = pathlib.Path(path)
    if guess_media_type(path) == "image/x-portable-floatmap":
        write_pfm(path, image)
        return
    codes = pixels_to_codes(image, 8)
    if codes.ndim == 3 and codes.shape[-1] == 1:
        codes = codes[..., 0]
    height, width = codes.shape[:2]
    greyscale = codes.ndim == 2
    writer = png.Writer(width, height, greyscale=greyscale, bitdepth=8)
    try:
        with path.open("wb") as file:
            writer.write(file, codes.reshape(height, -1).tolist())
    except OSError as e:
        raise ImageIOError(f"Cannot write {path}: {e}") from e
    logger.info("wrote %s", path)
