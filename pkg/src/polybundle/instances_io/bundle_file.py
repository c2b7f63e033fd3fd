"""Plain-text bundle files.

    n ell
    id x y          (n lines, ids 0..n-1)
    k id_1 ... id_k (ell lines)

Blank lines and ``#`` comments are ignored.  Coordinates are written with 17
significant digits, which is enough for an exact float round trip.
"""

from __future__ import annotations

from ..geometry import Bundle, BundleError

__all__ = [
    "BundleParseError",
    "read_bundle",
    "write_bundle",
    "load_bundle",
    "save_bundle",
    "read_kept",
    "write_kept",
]


class BundleParseError(ValueError):
    def __init__(self, lineno, msg):
        super().__init__(f"line {lineno}: {msg}" if lineno else msg)
        self.lineno = lineno


def _records(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield lineno, body.split()


def read_bundle(text: str) -> Bundle:
    records = _records(text)
    try:
        lineno, head = next(records)
    except StopIteration:
        raise BundleParseError(0, "empty bundle file") from None
    try:
        n, ell = (int(t) for t in head)
    except ValueError:
        raise BundleParseError(lineno, f"malformed header {' '.join(head)!r}, expected 'n ell'") from None
    if n < 0 or ell < 0:
        raise BundleParseError(lineno, "negative counts in header")

    coords = [None] * n
    for _ in range(n):
        try:
            lineno, rec = next(records)
        except StopIteration:
            raise BundleParseError(0, f"expected {n} point records") from None
        if len(rec) != 3:
            raise BundleParseError(lineno, "point record must be 'id x y'")
        try:
            pid, x, y = int(rec[0]), float(rec[1]), float(rec[2])
        except ValueError:
            raise BundleParseError(lineno, "point record must be 'id x y'") from None
        if not 0 <= pid < n:
            raise BundleParseError(lineno, f"point id {pid} out of range 0..{n - 1}")
        if coords[pid] is not None:
            raise BundleParseError(lineno, f"duplicate point id {pid}")
        coords[pid] = (x, y)

    lines = []
    for _ in range(ell):
        try:
            lineno, rec = next(records)
        except StopIteration:
            raise BundleParseError(0, f"expected {ell} polyline records") from None
        try:
            ids = [int(t) for t in rec]
        except ValueError:
            raise BundleParseError(lineno, "polyline record must be integers") from None
        k, ids = ids[0], ids[1:]
        if k != len(ids):
            raise BundleParseError(lineno, f"polyline declares {k} points but lists {len(ids)}")
        bad = [i for i in ids if not 0 <= i < n]
        if bad:
            raise BundleParseError(lineno, f"polyline references unknown point {bad[0]}")
        if len(set(ids)) != len(ids):
            raise BundleParseError(lineno, "polyline is not simple")
        if k < 2:
            raise BundleParseError(lineno, "polyline needs at least 2 points")
        lines.append(ids)

    extra = next(records, None)
    if extra is not None:
        raise BundleParseError(extra[0], "unexpected trailing content")
    try:
        return Bundle(coords, lines)
    except BundleError as exc:
        raise BundleParseError(0, str(exc)) from None


def write_bundle(bundle: Bundle) -> str:
    out = [f"{bundle.n} {bundle.ell}"]
    for i, (x, y) in enumerate(bundle.coords.tolist()):
        out.append(f"{i} {x:.17g} {y:.17g}")
    for line in bundle.lines:
        out.append(" ".join(map(str, (len(line),) + line)))
    return "\n".join(out) + "\n"


def load_bundle(path) -> Bundle:
    with open(path, encoding="utf-8") as fh:
        return read_bundle(fh.read())


def save_bundle(bundle: Bundle, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_bundle(bundle))


def write_kept(kept, header: str = "") -> str:
    """Kept-point file: optional ``#`` header lines, then sorted ids, one per line."""
    out = [f"# {h}" for h in header.splitlines()]
    out += [str(i) for i in sorted(kept)]
    return "\n".join(out) + "\n"


def read_kept(text: str) -> frozenset:
    ids = []
    for lineno, rec in _records(text):
        try:
            ids.extend(int(t) for t in rec)
        except ValueError:
            raise BundleParseError(lineno, "kept-point record must be integers") from None
    return frozenset(ids)
