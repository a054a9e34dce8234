"""Portable pixmap (PPM) reading and writing, plus channel split/merge.

Binary P6 and ASCII P3 with maxval 255 only; the processing chain is defined
on 8-bit data, and silently rescaling deeper files would corrupt fidelity
comparisons.  Writes are canonical (single-space header, newline-terminated),
so read -> write is a stable serialization.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .golden import Plane, RgbImage

_WHITESPACE = b" \t\r\n\x0b\x0c"


class PpmError(ValueError):
    """Malformed or unsupported PPM data; `offset` is the byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class PpmHeader:
    magic: str
    width: int
    height: int
    maxval: int


class _Tokenizer:
    """Whitespace/comment-aware token scanner over raw PPM bytes."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def skip_separators(self):
        data = self.data
        while self.pos < len(data):
            c = data[self.pos : self.pos + 1]
            if c in (b"#",):
                nl = data.find(b"\n", self.pos)
                self.pos = len(data) if nl < 0 else nl + 1
            elif c in _WHITESPACE:
                self.pos += 1
            else:
                return

    def token(self, what: str) -> tuple[bytes, int]:
        self.skip_separators()
        if self.pos >= len(self.data):
            raise PpmError(f"unexpected end of file while reading {what}", len(self.data))
        start = self.pos
        while self.pos < len(self.data):
            c = self.data[self.pos : self.pos + 1]
            if c in _WHITESPACE or c == b"#":
                break
            self.pos += 1
        return self.data[start : self.pos], start

    def int_token(self, what: str) -> tuple[int, int]:
        tok, start = self.token(what)
        if not tok.isdigit():
            raise PpmError(f"expected integer {what}, got {tok!r}", start)
        return int(tok), start


def read_header(data: bytes) -> tuple[PpmHeader, int]:
    """Parse the header; returns it and the offset where pixel data starts."""
    tok = _Tokenizer(data)
    magic, start = tok.token("magic number")
    if magic not in (b"P6", b"P3"):
        raise PpmError(f"unsupported magic {magic!r}, expected P6 or P3", start)
    width, woff = tok.int_token("width")
    height, hoff = tok.int_token("height")
    if width < 1 or height < 1:
        raise PpmError(f"invalid dimensions {width}x{height}", woff if width < 1 else hoff)
    maxval, moff = tok.int_token("maxval")
    if maxval != 255:
        raise PpmError(f"unsupported maxval {maxval}, only 255 is accepted", moff)
    if magic == b"P6":
        # exactly one whitespace byte separates maxval from the payload
        if tok.pos >= len(data) or data[tok.pos : tok.pos + 1] not in _WHITESPACE:
            raise PpmError("missing whitespace after maxval", tok.pos)
        tok.pos += 1
    return PpmHeader(magic.decode(), width, height, maxval), tok.pos


def read_ppm(data: bytes) -> RgbImage:
    """Decode P6/P3 bytes into an RgbImage; errors name the byte offset."""
    header, pos = read_header(data)
    count = header.width * header.height * 3
    if header.magic == "P6":
        payload = data[pos : pos + count]
        if len(payload) < count:
            raise PpmError(
                f"truncated payload: expected {count} bytes, found {len(payload)}", len(data)
            )
        flat = np.frombuffer(payload, dtype=np.uint8)
    else:
        tok = _Tokenizer(data)
        tok.pos = pos
        samples = np.empty(count, dtype=np.uint8)
        for i in range(count):
            value, off = tok.int_token(f"sample {i}")
            if value > header.maxval:
                raise PpmError(f"sample value {value} exceeds maxval {header.maxval}", off)
            samples[i] = value
        flat = samples
    arr = flat.reshape(header.height, header.width, 3)
    return RgbImage.from_array(arr)


def write_ppm(image: RgbImage, format: str = "P6") -> bytes:
    """Serialize to canonical P6 or P3 bytes."""
    if format not in ("P6", "P3"):
        raise ValueError(f"format must be 'P6' or 'P3', got {format!r}")
    header = f"{format}\n{image.width} {image.height}\n255\n".encode()
    arr = image.to_array()
    if format == "P6":
        return header + arr.tobytes()
    lines = ("%d %d %d" % tuple(px) for px in arr.reshape(-1, 3))
    return header + ("\n".join(lines) + "\n").encode()


def read_ppm_file(path) -> RgbImage:
    return read_ppm(Path(path).read_bytes())


def write_ppm_file(path, image: RgbImage, format: str = "P6") -> None:
    Path(path).write_bytes(write_ppm(image, format))


def split_channels(image: RgbImage) -> tuple[Plane, Plane, Plane]:
    return image.planes()


def merge_channels(r: Plane, g: Plane, b: Plane) -> RgbImage:
    return RgbImage(r=r, g=g, b=b)
