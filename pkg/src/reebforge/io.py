"""Text formats: complexes (.scx), PL maps (.plf) and semialgebraic specs.

All writers go through a temporary file and ``os.replace`` so readers never
see a half-written artifact.
"""
from __future__ import annotations

import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

from .complex import SimplicialComplex, Subcomplex
from .errors import EmptyInput, InputError, ParseError, ReebForgeError
from .plmap import PLMap
from .semialg import Polynomial, SemialgSpec, sampler

PathLike = Union[str, os.PathLike]


def atomic_write(path: PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent or "."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path: PathLike) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise ParseError("file is not valid UTF-8", path=str(path)) from None


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


# complexes ----------------------------------------------------------------------------


def parse_scx(text: str, path: Optional[str] = None) -> SimplicialComplex:
    simplices = []
    for no, line in _lines(text):
        try:
            verts = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"expected non-negative integers, got {line!r}", line=no, path=path) from None
        if any(v < 0 for v in verts):
            raise ParseError("vertex ids must be non-negative", line=no, path=path)
        if len(set(verts)) != len(verts):
            raise ParseError(f"repeated vertex in simplex {verts}", line=no, path=path)
        simplices.append(verts)
    if not simplices:
        raise EmptyInput(f"{path or 'input'}: no simplices")
    return SimplicialComplex.from_maximal_simplices(simplices)


def format_scx(c: SimplicialComplex, header: Optional[str] = None) -> str:
    out = []
    if header:
        out.extend(f"# {h}" for h in header.splitlines())
    out.extend(" ".join(map(str, s)) for s in c.maximal_simplices)
    return "\n".join(out) + "\n"


def read_scx(path: PathLike) -> SimplicialComplex:
    return parse_scx(_read(path), str(path))


def write_scx(path: PathLike, c: SimplicialComplex, header: Optional[str] = None) -> None:
    atomic_write(path, format_scx(c, header))


def read_subcomplex(path: PathLike, parent: SimplicialComplex) -> Subcomplex:
    c = read_scx(path)
    return Subcomplex(parent, c)


# PL maps ------------------------------------------------------------------------------


def _value(tok: str, no: int, path) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad value {tok!r}", line=no, path=path) from None


def plf_domain(text: str) -> Optional[str]:
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("#") and line[1:].strip().startswith("domain:"):
            return line[1:].strip()[len("domain:"):].strip()
    return None


def parse_plf(text: str, domain: SimplicialComplex, path: Optional[str] = None) -> PLMap:
    """Lines ``vertex value [rank]``; the optional rank column fixes ties."""
    values, ranks = {}, {}
    for no, line in _lines(text):
        toks = line.split()
        if len(toks) not in (2, 3):
            raise ParseError(f"expected 'vertex value [rank]', got {line!r}", line=no, path=path)
        try:
            v = int(toks[0])
        except ValueError:
            raise ParseError(f"bad vertex id {toks[0]!r}", line=no, path=path) from None
        if v in values:
            raise ParseError(f"vertex {v} listed twice", line=no, path=path)
        values[v] = _value(toks[1], no, path)
        if len(toks) == 3:
            try:
                ranks[v] = int(toks[2])
            except ValueError:
                raise ParseError(f"bad rank {toks[2]!r}", line=no, path=path) from None
    if not values:
        raise EmptyInput(f"{path or 'input'}: no vertex values")
    if ranks:
        if len(ranks) != len(values):
            raise ParseError("either every line or no line carries a rank", path=path)
        if sorted(ranks.values()) != list(range(len(ranks))):
            raise ParseError("ranks must be 0..n-1", path=path)
        return PLMap(domain, values, tuple(sorted(ranks, key=ranks.get)))
    return PLMap.from_order(domain, values)


def format_plf(f: PLMap, domain_name: Optional[str] = None) -> str:
    out = []
    if domain_name:
        out.append(f"# domain: {domain_name}")
    rank = f.rank
    out.extend(f"{v} {f.values[v]} {rank[v]}" for v in sorted(f.values))
    return "\n".join(out) + "\n"


def read_plf(path: PathLike, domain: SimplicialComplex) -> PLMap:
    return parse_plf(_read(path), domain, str(path))


def write_plf(path: PathLike, f: PLMap, domain_name: Optional[str] = None) -> None:
    atomic_write(path, format_plf(f, domain_name))


# semialgebraic specs ------------------------------------------------------------------


def parse_semialg(text: str, path: Optional[str] = None) -> SemialgSpec:
    """Keywords ``ambient n``, ``sampler name resolution`` and ``poly``.

    Each ``poly`` line opens a polynomial whose terms follow as
    ``coeff e1 ... en`` lines.
    """
    n = None
    samp = None
    res = 100
    polys: List[List[Tuple[Tuple[int, ...], Fraction]]] = []
    for no, line in _lines(text):
        toks = line.split()
        head = toks[0].lower()
        if head == "ambient":
            if len(toks) != 2 or not toks[1].isdigit() or int(toks[1]) < 1:
                raise ParseError("expected 'ambient n'", line=no, path=path)
            n = int(toks[1])
        elif head == "sampler":
            if len(toks) not in (2, 3):
                raise ParseError("expected 'sampler name [resolution]'", line=no, path=path)
            try:
                samp = sampler(toks[1])
            except InputError as exc:
                raise ParseError(str(exc), line=no, path=path) from None
            if len(toks) == 3:
                if not toks[2].isdigit():
                    raise ParseError(f"bad resolution {toks[2]!r}", line=no, path=path)
                res = int(toks[2])
        elif head == "poly":
            polys.append([])
        else:
            if n is None:
                raise ParseError("term line before 'ambient'", line=no, path=path)
            if not polys:
                raise ParseError("term line before 'poly'", line=no, path=path)
            if len(toks) != n + 1:
                raise ParseError(f"expected coefficient and {n} exponents", line=no, path=path)
            coeff = _value(toks[0], no, path)
            try:
                exps = tuple(int(t) for t in toks[1:])
            except ValueError:
                raise ParseError("exponents must be integers", line=no, path=path) from None
            if any(e < 0 for e in exps):
                raise ParseError("exponents must be non-negative", line=no, path=path)
            polys[-1].append((exps, coeff))
    if n is None:
        raise ParseError("missing 'ambient' line", path=path)
    if samp is None:
        raise ParseError("missing 'sampler' line", path=path)
    if not polys:
        raise ParseError("no polynomials", path=path)
    try:
        return SemialgSpec(tuple(Polynomial.from_terms(n, p) for p in polys), samp, res)
    except ReebForgeError as exc:
        raise ParseError(str(exc), path=path) from None


def format_semialg(spec: SemialgSpec) -> str:
    out = [f"ambient {spec.n}", f"sampler {spec.manifold.name} {spec.resolution}"]
    for p in spec.g:
        out.append("poly")
        out.extend(f"{c} " + " ".join(map(str, e)) for e, c in p.terms)
    return "\n".join(out) + "\n"


def read_semialg(path: PathLike) -> SemialgSpec:
    return parse_semialg(_read(path), str(path))


def format_csv(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    import csv
    import io as _io

    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()
