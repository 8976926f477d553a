"""On-disk coefficient cache.

File layout: an ASCII header of ``key=value`` lines, opened by the magic line
``STSPACING-COEFFS <version>`` and closed by an empty line, followed by one
record per coefficient a_1..a_n_max. Each record is a little-endian uint32
byte length and then that many bytes of little-endian two's-complement.
"""

from __future__ import annotations

import logging
import os
import re
import struct
from pathlib import Path

from .errors import CacheFormatError
from .eta import CoefficientTable, EtaProductSpec, eta_product

log = logging.getLogger(__name__)

MAGIC = "STSPACING-COEFFS"
FORMAT_VERSION = 1
CACHE_ENV = "STSPACING_CACHE"
_LEN = struct.Struct("<I")


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "stspacing"


def cache_path(cache_dir, label: str, n_max: int) -> Path:
    safe = re.sub(r"[^A-Za-z0-9_.-]", "-", label)
    return Path(cache_dir) / f"{safe}.N{n_max}.coef"


def _encode(value: int) -> bytes:
    size = max(1, (value.bit_length() + 8) // 8)
    return _LEN.pack(size) + value.to_bytes(size, "little", signed=True)


def write_table(path, table: CoefficientTable, spec: EtaProductSpec | None = None) -> None:
    path = Path(path)
    header = [
        f"{MAGIC} {FORMAT_VERSION}",
        f"label={table.label}",
        f"n_max={table.n_max}",
        f"weight={table.weight}",
        "bad_primes=" + ",".join(str(p) for p in sorted(table.bad_primes)),
    ]
    if spec is not None:
        header.append("factors=" + ",".join(f"{m}:{e}" for m, e in spec.factors))
    body = b"".join(_encode(v) for v in table.values)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(("\n".join(header) + "\n\n").encode("ascii"))
        fh.write(body)
    os.replace(tmp, path)


def read_table(path) -> tuple[dict[str, str], CoefficientTable]:
    data = Path(path).read_bytes()
    split = data.find(b"\n\n")
    if split < 0:
        raise CacheFormatError(f"{path}: missing header terminator")
    lines = data[:split].decode("ascii").split("\n")
    magic = lines[0].split()
    if len(magic) != 2 or magic[0] != MAGIC:
        raise CacheFormatError(f"{path}: not a coefficient cache")
    if int(magic[1]) != FORMAT_VERSION:
        raise CacheFormatError(f"{path}: unsupported format version {magic[1]}")
    header = dict(line.split("=", 1) for line in lines[1:])
    n_max = int(header["n_max"])
    values = []
    pos = split + 2
    for _ in range(n_max):
        if pos + 4 > len(data):
            raise CacheFormatError(f"{path}: truncated after {len(values)} records")
        (size,) = _LEN.unpack_from(data, pos)
        pos += 4
        chunk = data[pos : pos + size]
        if len(chunk) != size:
            raise CacheFormatError(f"{path}: truncated record {len(values) + 1}")
        values.append(int.from_bytes(chunk, "little", signed=True))
        pos += size
    if pos != len(data):
        raise CacheFormatError(f"{path}: {len(data) - pos} trailing bytes")
    bad = frozenset(int(p) for p in header.get("bad_primes", "").split(",") if p)
    table = CoefficientTable(tuple(values), int(header["weight"]), bad, header.get("label", ""))
    return header, table


def load_or_compute(spec: EtaProductSpec, n_max: int, cache_dir=None) -> tuple[CoefficientTable, bool]:
    """Return (table, cache_hit). Unreadable or mismatched cache files are rebuilt."""
    if cache_dir is None:
        return eta_product(spec, n_max), False
    path = cache_path(cache_dir, spec.label, n_max)
    want = ",".join(f"{m}:{e}" for m, e in spec.factors)
    if path.exists():
        try:
            header, table = read_table(path)
            if header.get("factors") == want and table.n_max == n_max and table.bad_primes == spec.bad_primes:
                return table, True
            log.warning("cache %s does not match %s; rebuilding", path, spec.label)
        except (CacheFormatError, KeyError, ValueError) as exc:
            log.warning("discarding unreadable cache %s: %s", path, exc)
    table = eta_product(spec, n_max)
    write_table(path, table, spec)
    return table, False
