#!/usr/bin/env python3
"""Writes the golden fixtures from an independent implementation of the layout rules."""
import base64
import struct
import sys
import zlib
from pathlib import Path

Q = {"unix": b"-\n", "mime": b"\r\n"}


def fixed(data, width, style):
    assert len(data) <= width - 4
    return data + b" " + b"-" * (width - len(data) - 3) + Q[style]


def data_pad(data, style):
    n = len(data)
    p = next(p for p in range(7, 39) if (n + p) % 32 == 0)
    if n > 0 and data[-1:] == b"\n":
        head = b"=="
    else:
        head = b"\r\n" if style == "mime" else b"\n="
    tail = b"\r\n\r\n" if style == "mime" else b"\n\n"
    return head + b"=" * (p - len(head) - len(tail)) + tail


def count(letter, value, style):
    return fixed(letter + b" " + str(value).encode(), 32, style)


def header(kind, user, style):
    return fixed(kind + b" " + user, 64, style)


def file_header(user, style, vendor=b"scda-kit 0.1"):
    return b"scdata0 " + fixed(vendor, 24, style) + header(b"F", user, style) + data_pad(b"", style)


def inline(user, data, style):
    assert len(data) == 32
    return header(b"I", user, style) + data


def block(user, data, style):
    return header(b"B", user, style) + count(b"E", len(data), style) + data + data_pad(data, style)


def array(user, elements, size, style):
    payload = b"".join(elements)
    return (header(b"A", user, style) + count(b"N", len(elements), style) + count(b"E", size, style)
            + payload + data_pad(payload, style))


def varray(user, elements, style, letter=b"E"):
    payload = b"".join(elements)
    table = b"".join(count(letter, len(e), style) for e in elements)
    return (header(b"V", user, style) + count(b"N", len(elements), style) + table + payload
            + data_pad(payload, style))


def compress(data, style):
    stage = struct.pack(">Q", len(data)) + b"z" + zlib.compress(data, 0)
    code = base64.b64encode(stage)
    brk = b"=\n" if style == "unix" else b"\r\n"
    return b"".join(code[i:i + 76] + brk for i in range(0, len(code), 76))


def compressed_block(user, data, style):
    return (inline(b"B compressed scda 00", count(b"U", len(data), style), style)
            + block(user, compress(data, style), style))


INLINE = b"0123456789abcdefghijklmnopqrstuv"
BLOCK = b"The quick brown fox\njumps over the lazy dog\n"
ELEMENTS = [b"alpha", b"", b"gamma ray", b"\x00\x01\x02"]
FIXED = [b"aaaa", b"bbbb", b"cccc", b"dddd", b"eeee"]


def main(out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "header_only.scda").write_bytes(file_header(b"hello", "unix"))
    (out / "three_sections.scda").write_bytes(
        file_header(b"golden", "unix") + inline(b"inline", INLINE, "unix") + block(b"text block", BLOCK, "unix")
        + varray(b"variable", ELEMENTS, "unix"))
    (out / "four_sections_mime.scda").write_bytes(
        file_header(b"", "mime") + inline(b"", INLINE, "mime") + block(b"empty", b"", "mime")
        + array(b"fixed", FIXED, 4, "mime") + varray(b"variable", ELEMENTS, "mime"))
    (out / "compressed_block_stored.scda").write_bytes(
        file_header(b"zip", "unix") + compressed_block(b"text block", BLOCK, "unix"))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent)
