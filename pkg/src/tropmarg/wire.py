"""Canonical byte formats for matrices, words, marginal sets, params,
transcripts and attack reports.

Everything serializes to canonical JSON: sorted keys, no whitespace, UTF-8,
one trailing newline.  Scalars are decimal integers, rationals as "p/q"
strings, and the two infinities as "inf" / "-inf"; floats are rejected in
both directions.  Marginal sets support three encodings: raw tuples, an
interval form for sets that are exactly an axis-aligned integer box (single
matrices only), and a delta form storing the first matrix plus sparse diffs
against each predecessor.  Files are written atomically (write then rename).
"""

from __future__ import annotations

import itertools
import json
import os
import tempfile
from fractions import Fraction
from typing import Sequence

from .families import (
    CirculantFamily,
    FamilySpec,
    JonesDeformFamily,
    LdpFamily,
    LowerSCirculantFamily,
    PolyFamily,
    UpperTCirculantFamily,
)
from .marginal import (
    Box,
    Circle,
    Const,
    MarginalSet,
    WordTemplate,
    verify_marginal,
)
from .matrix import Matrix
from .protocols import Message, ProtocolParams, ProtocolTranscript
from .semiring import (
    NEG_INF,
    POS_INF,
    Scalar,
    SemiringKind,
    as_scalar,
    is_finite,
)


class WireFormatError(ValueError):
    """Malformed bytes or an object that cannot be represented."""


class MarginalVerificationError(ValueError):
    """Decoded set contains tuples that fail verification."""

    def __init__(self, indices: Sequence[int]):
        super().__init__(f"tuples at indices {list(indices)} do not verify")
        self.indices = tuple(indices)


# --------------------------------------------------------------------------
# Scalars and canonical JSON


def scalar_to_token(x: Scalar):
    if x is POS_INF:
        return "inf"
    if x is NEG_INF:
        return "-inf"
    if isinstance(x, bool):
        raise WireFormatError("bool is not a scalar")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    raise WireFormatError(f"not a serializable scalar: {x!r}")


def token_to_scalar(tok) -> Scalar:
    if isinstance(tok, bool):
        raise WireFormatError("bool is not a scalar")
    if isinstance(tok, int):
        return tok
    if isinstance(tok, str):
        if tok == "inf":
            return POS_INF
        if tok == "-inf":
            return NEG_INF
        num, sep, den = tok.partition("/")
        try:
            if sep:
                return as_scalar(Fraction(int(num), int(den)))
            return int(num)
        except (ValueError, ZeroDivisionError) as e:
            raise WireFormatError(f"bad scalar token {tok!r}") from e
    raise WireFormatError(f"bad scalar token {tok!r}")


def _reject_float(s: str):
    raise WireFormatError(f"float literal {s!r} on the wire")


def to_canonical_bytes(obj) -> bytes:
    return (
        json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
        + "\n"
    ).encode("utf-8")


def from_canonical_bytes(data: bytes):
    try:
        return json.loads(data.decode("utf-8"), parse_float=_reject_float)
    except WireFormatError:
        raise
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise WireFormatError(f"not canonical JSON: {e}") from e


def write_bytes(path: str, data: bytes) -> None:
    """Atomic write: temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".wire-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_bytes(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


# --------------------------------------------------------------------------
# Matrices and words


def _rows_out(m: Matrix):
    return [[scalar_to_token(x) for x in row] for row in m.rows]


def _rows_in(kind: SemiringKind, rows) -> Matrix:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise WireFormatError("matrix rows must be nested arrays")
    try:
        return Matrix(
            kind, tuple(tuple(token_to_scalar(x) for x in row) for row in rows)
        )
    except (TypeError, ValueError) as e:
        raise WireFormatError(str(e)) from e


def _kind_in(token) -> SemiringKind:
    try:
        return SemiringKind(token)
    except ValueError as e:
        raise WireFormatError(f"unknown semiring {token!r}") from e


def encode_matrix(m: Matrix) -> bytes:
    return to_canonical_bytes(
        {"type": "matrix", "kind": str(m.kind), "rows": _rows_out(m)}
    )


def decode_matrix(data: bytes) -> Matrix:
    obj = from_canonical_bytes(data)
    _expect_type(obj, "matrix")
    return _rows_in(_kind_in(obj.get("kind")), obj.get("rows"))


_ATOM_TAGS = {"const": Const, "box": Box, "circle": Circle}


def _word_out(w: WordTemplate):
    def atom(a):
        if isinstance(a, Const):
            return ["const", a.index]
        if isinstance(a, Box):
            return ["box", a.slot]
        return ["circle", a.slot]

    return {
        "kind": str(w.kind),
        "dim": w.dim,
        "constants": [_rows_out(c) for c in w.constants],
        "summands": [[atom(a) for a in s] for s in w.summands],
    }


def _word_in(obj) -> WordTemplate:
    if not isinstance(obj, dict):
        raise WireFormatError("word must be an object")
    kind = _kind_in(obj.get("kind"))
    dim = obj.get("dim")
    if not isinstance(dim, int):
        raise WireFormatError("word dim must be an integer")
    constants = tuple(_rows_in(kind, rows) for rows in obj.get("constants", []))
    summands = []
    for s in obj.get("summands", []):
        atoms = []
        for pair in s:
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or pair[0] not in _ATOM_TAGS
                or not isinstance(pair[1], int)
            ):
                raise WireFormatError(f"bad word atom {pair!r}")
            atoms.append(_ATOM_TAGS[pair[0]](pair[1]))
        summands.append(tuple(atoms))
    try:
        return WordTemplate(kind, dim, constants, tuple(summands))
    except (TypeError, ValueError) as e:
        raise WireFormatError(str(e)) from e


def encode_word(w: WordTemplate) -> bytes:
    return to_canonical_bytes({"type": "word", **_word_out(w)})


def decode_word(data: bytes) -> WordTemplate:
    obj = from_canonical_bytes(data)
    _expect_type(obj, "word")
    return _word_in(obj)


def _expect_type(obj, expected: str) -> None:
    if not isinstance(obj, dict) or obj.get("type") != expected:
        raise WireFormatError(f"expected a {expected} object")


# --------------------------------------------------------------------------
# Marginal sets: raw / interval / delta


def _box_form(s: MarginalSet):
    """Interval body if the set is exactly an integer box of single matrices,
    else None.  Cell form: a bare value for a constant entry, [lo, hi] for a
    full contiguous range."""
    if s.word.arity != 1 or not s.tuples:
        return None
    n = s.word.dim
    per_cell = [[set() for _ in range(n)] for _ in range(n)]
    for (m,) in s.tuples:
        for i in range(n):
            for j in range(n):
                v = m.rows[i][j]
                if not is_finite(v) or not isinstance(v, int):
                    return None
                per_cell[i][j].add(v)
    total = 1
    for i in range(n):
        for j in range(n):
            vals = per_cell[i][j]
            if max(vals) - min(vals) + 1 != len(vals):
                return None  # gaps: not a contiguous range
            total *= len(vals)
    if total != len(s.tuples):
        return None
    return [
        [
            min(c) if len(c) == 1 else [min(c), max(c)]
            for c in (per_cell[i][j] for j in range(n))
        ]
        for i in range(n)
    ]


def _delta_form(s: MarginalSet):
    """Delta body for single-matrix sets: first matrix in full, then per
    matrix the 1-based ((i, j), value) cells that changed from its
    predecessor."""
    if s.word.arity != 1 or not s.tuples:
        return None
    n = s.word.dim
    mats = [t[0] for t in s.tuples]
    diffs = []
    for prev, cur in zip(mats, mats[1:]):
        changes = [
            [[i + 1, j + 1], scalar_to_token(cur.rows[i][j])]
            for i in range(n)
            for j in range(n)
            if cur.rows[i][j] != prev.rows[i][j]
        ]
        diffs.append(changes)
    return {"base": _rows_out(mats[0]), "diffs": diffs}


def encode_marginal_set(s: MarginalSet, encoding: str = "raw") -> bytes:
    """Serialize with the requested encoding, falling back silently when it
    does not apply: interval needs an exact integer box, delta needs
    single-matrix tuples; raw always applies."""
    if encoding not in ("raw", "interval", "delta"):
        raise WireFormatError(f"unknown encoding {encoding!r}")
    body = None
    used = "raw"
    if encoding == "interval":
        box = _box_form(s)
        if box is not None:
            used, body = "interval", {"box": box}
        else:
            encoding = "delta"
    if encoding == "delta" and body is None:
        delta = _delta_form(s)
        if delta is not None:
            used, body = "delta", delta
    if body is None:
        used = "raw"
        body = {"tuples": [[_rows_out(m) for m in t] for t in s.tuples]}
    return to_canonical_bytes(
        {"type": "marginal-set", "encoding": used, "word": _word_out(s.word), **body}
    )


def _marginal_set_payload(obj) -> MarginalSet:
    word = _word_in(obj.get("word"))
    encoding = obj.get("encoding")
    kind = word.kind
    if encoding == "raw":
        raw = obj.get("tuples")
        if not isinstance(raw, list):
            raise WireFormatError("raw set needs a tuples array")
        tuples = [tuple(_rows_in(kind, rows) for rows in t) for t in raw]
    elif encoding == "interval":
        box = obj.get("box")
        if not isinstance(box, list):
            raise WireFormatError("interval set needs a box")
        n = word.dim
        cells = []
        for i in range(n):
            for j in range(n):
                cell = box[i][j]
                if isinstance(cell, int):
                    cells.append(range(cell, cell + 1))
                elif (
                    isinstance(cell, list)
                    and len(cell) == 2
                    and all(isinstance(x, int) for x in cell)
                ):
                    cells.append(range(cell[0], cell[1] + 1))
                else:
                    raise WireFormatError(f"bad interval cell {cell!r}")
        tuples = []
        for combo in itertools.product(*cells):
            rows = tuple(tuple(combo[i * n + j] for j in range(n)) for i in range(n))
            tuples.append((Matrix(kind, rows),))
    elif encoding == "delta":
        base = _rows_in(kind, obj.get("base"))
        mats = [base]
        diffs = obj.get("diffs")
        if not isinstance(diffs, list):
            raise WireFormatError("delta set needs a diffs array")
        for changes in diffs:
            rows = [list(r) for r in mats[-1].rows]
            for change in changes:
                try:
                    (i, j), tok = change
                except (TypeError, ValueError) as e:
                    raise WireFormatError(f"bad delta cell {change!r}") from e
                if not (1 <= i <= base.dim and 1 <= j <= base.dim):
                    raise WireFormatError(f"delta position {(i, j)} out of range")
                rows[i - 1][j - 1] = token_to_scalar(tok)
            mats.append(Matrix(kind, tuple(tuple(r) for r in rows)))
        tuples = [(m,) for m in mats]
    else:
        raise WireFormatError(f"unknown encoding {encoding!r}")
    bad = [k for k, t in enumerate(tuples) if not verify_marginal(word, t)]
    if bad:
        raise MarginalVerificationError(bad)
    return MarginalSet(word, tuple(tuples))


def decode_marginal_set(data: bytes) -> MarginalSet:
    obj = from_canonical_bytes(data)
    _expect_type(obj, "marginal-set")
    return _marginal_set_payload(obj)


# --------------------------------------------------------------------------
# Family specs


def _family_out(spec: FamilySpec):
    if isinstance(spec, PolyFamily):
        return {
            "family": "poly",
            "base": _rows_out(spec.base),
            "max_degree": spec.max_degree,
            "coeff_lo": spec.coeff_lo,
            "coeff_hi": spec.coeff_hi,
        }
    if isinstance(spec, CirculantFamily):
        return {"family": "circulant", "lo": spec.lo, "hi": spec.hi}
    if isinstance(spec, UpperTCirculantFamily):
        return {
            "family": "upper-t",
            "t": scalar_to_token(spec.t),
            "lo": spec.lo,
            "hi": spec.hi,
        }
    if isinstance(spec, LowerSCirculantFamily):
        return {
            "family": "lower-s",
            "s": scalar_to_token(spec.s),
            "lo": spec.lo,
            "hi": spec.hi,
        }
    if isinstance(spec, JonesDeformFamily):
        return {
            "family": "jones-deform",
            "base": _rows_out(spec.base),
            "alpha_lo": scalar_to_token(spec.alpha_lo),
            "alpha_hi": scalar_to_token(spec.alpha_hi),
            "max_denominator": spec.max_denominator,
        }
    if isinstance(spec, LdpFamily):
        return {"family": "ldp", "r": spec.r, "k": spec.k}
    raise WireFormatError(f"unknown family spec {spec!r}")


def _family_in(obj, kind: SemiringKind, dim: int) -> FamilySpec:
    if not isinstance(obj, dict):
        raise WireFormatError("family spec must be an object")
    name = obj.get("family")
    try:
        if name == "poly":
            return PolyFamily(
                base=_rows_in(kind, obj.get("base")),
                max_degree=obj["max_degree"],
                coeff_lo=obj["coeff_lo"],
                coeff_hi=obj["coeff_hi"],
            )
        if name == "circulant":
            return CirculantFamily(kind=kind, dim=dim, lo=obj["lo"], hi=obj["hi"])
        if name == "upper-t":
            return UpperTCirculantFamily(
                kind=kind, dim=dim, t=token_to_scalar(obj["t"]),
                lo=obj["lo"], hi=obj["hi"],
            )
        if name == "lower-s":
            return LowerSCirculantFamily(
                kind=kind, dim=dim, s=token_to_scalar(obj["s"]),
                lo=obj["lo"], hi=obj["hi"],
            )
        if name == "jones-deform":
            lo, hi = token_to_scalar(obj["alpha_lo"]), token_to_scalar(obj["alpha_hi"])
            return JonesDeformFamily(
                base=_rows_in(kind, obj.get("base")),
                alpha_lo=Fraction(lo),
                alpha_hi=Fraction(hi),
                max_denominator=obj["max_denominator"],
            )
        if name == "ldp":
            if kind is not SemiringKind.MIN_PLUS:
                raise WireFormatError("ldp family is min-plus only")
            return LdpFamily(dim=dim, r=obj["r"], k=obj["k"])
    except (KeyError, TypeError, ValueError) as e:
        raise WireFormatError(f"bad {name} family spec: {e}") from e
    raise WireFormatError(f"unknown family {name!r}")


# --------------------------------------------------------------------------
# Params


def _params_body(p: ProtocolParams):
    return {
        "kind": str(p.kind),
        "dim": p.dim,
        "publics": [_rows_out(w) for w in p.publics],
        "left": [_family_out(f) for f in p.left_families],
        "right": [_family_out(f) for f in p.right_families],
        "n_tuples": p.n_tuples,
        "l": p.l,
        "l1": p.l1,
        "l2": p.l2,
        "seed": p.seed,
    }


def encode_params(p: ProtocolParams) -> bytes:
    """Scripted replays never serialize; only the public agreement does."""
    if p.script is not None:
        raise WireFormatError("params carrying a scripted replay are not serializable")
    return to_canonical_bytes({"type": "params", **_params_body(p)})


def _params_in(obj) -> ProtocolParams:
    kind = _kind_in(obj.get("kind"))
    dim = obj.get("dim")
    if not isinstance(dim, int):
        raise WireFormatError("params dim must be an integer")
    for key in ("n_tuples", "l", "l1", "l2", "seed"):
        if not isinstance(obj.get(key), int):
            raise WireFormatError(f"params field {key} must be an integer")
    try:
        return ProtocolParams(
            kind=kind,
            dim=dim,
            publics=tuple(_rows_in(kind, rows) for rows in obj.get("publics", [])),
            left_families=tuple(
                _family_in(f, kind, dim) for f in obj.get("left", [])
            ),
            right_families=tuple(
                _family_in(f, kind, dim) for f in obj.get("right", [])
            ),
            n_tuples=obj["n_tuples"],
            l=obj["l"],
            l1=obj["l1"],
            l2=obj["l2"],
            seed=obj["seed"],
        )
    except (TypeError, ValueError) as e:
        raise WireFormatError(str(e)) from e


def decode_params(data: bytes) -> ProtocolParams:
    obj = from_canonical_bytes(data)
    _expect_type(obj, "params")
    return _params_in(obj)


# --------------------------------------------------------------------------
# Transcripts


def _payload_out(payload):
    if isinstance(payload, Matrix):
        return {"kind": "matrix", "rows": _rows_out(payload)}
    if isinstance(payload, MarginalSet):
        return {
            "kind": "marginal-set",
            "word": _word_out(payload.word),
            "tuples": [[_rows_out(m) for m in t] for t in payload.tuples],
        }
    if isinstance(payload, tuple):
        return {"kind": "matrix-tuple", "items": [_rows_out(m) for m in payload]}
    raise WireFormatError(f"unknown payload {payload!r}")


def _payload_in(obj, kind: SemiringKind):
    if not isinstance(obj, dict):
        raise WireFormatError("payload must be an object")
    what = obj.get("kind")
    if what == "matrix":
        return _rows_in(kind, obj.get("rows"))
    if what == "marginal-set":
        return _marginal_set_payload(
            {"word": obj.get("word"), "encoding": "raw", "tuples": obj.get("tuples")}
        )
    if what == "matrix-tuple":
        return tuple(_rows_in(kind, rows) for rows in obj.get("items", []))
    raise WireFormatError(f"unknown payload kind {what!r}")


def encode_transcript(t: ProtocolTranscript) -> bytes:
    return to_canonical_bytes(
        {
            "type": "transcript",
            "protocol": t.protocol,
            "seed": t.seed,
            "params": _params_body(t.public_params()),
            "messages": [
                {
                    "sender": m.sender,
                    "label": m.label,
                    "payload": _payload_out(m.payload),
                }
                for m in t.messages
            ],
            "keys": {"alice": _rows_out(t.key_a), "bob": _rows_out(t.key_b)},
            "annotations": list(t.annotations),
        }
    )


def decode_transcript(data: bytes) -> ProtocolTranscript:
    obj = from_canonical_bytes(data)
    _expect_type(obj, "transcript")
    params = _params_in(obj.get("params", {}))
    protocol = obj.get("protocol")
    if protocol not in ("sidelnikov", "one-sided", "sandwich", "multiblock"):
        raise WireFormatError(f"unknown protocol {protocol!r}")
    seed = obj.get("seed")
    if not isinstance(seed, int):
        raise WireFormatError("transcript seed must be an integer")
    messages = []
    for m in obj.get("messages", []):
        if not isinstance(m, dict) or m.get("sender") not in ("alice", "bob"):
            raise WireFormatError("bad message record")
        label = m.get("label")
        if not isinstance(label, str):
            raise WireFormatError("bad message label")
        messages.append(
            Message(m["sender"], label, _payload_in(m.get("payload"), params.kind))
        )
    keys = obj.get("keys")
    if not isinstance(keys, dict):
        raise WireFormatError("transcript needs a keys object")
    annotations = obj.get("annotations", [])
    if not all(isinstance(a, str) for a in annotations):
        raise WireFormatError("annotations must be strings")
    return ProtocolTranscript(
        protocol=protocol,
        params=params,
        seed=seed,
        messages=tuple(messages),
        key_a=_rows_in(params.kind, keys.get("alice")),
        key_b=_rows_in(params.kind, keys.get("bob")),
        annotations=tuple(annotations),
    )


# --------------------------------------------------------------------------
# Attack reports


def encode_report(report: dict) -> bytes:
    """report fields: protocol, degree, decomposed, match, z (scalar rows or
    null), candidate (rows or null), expected (rows or null), kind."""
    out = {
        "type": "report",
        "protocol": report["protocol"],
        "degree": report["degree"],
        "kind": str(report["kind"]),
        "decomposed": bool(report["decomposed"]),
        "match": report["match"],
        "z": None
        if report.get("z") is None
        else [[scalar_to_token(x) for x in row] for row in report["z"]],
        "candidate": None
        if report.get("candidate") is None
        else _rows_out(report["candidate"]),
        "expected": None
        if report.get("expected") is None
        else _rows_out(report["expected"]),
    }
    return to_canonical_bytes(out)


def decode_report(data: bytes) -> dict:
    obj = from_canonical_bytes(data)
    _expect_type(obj, "report")
    kind = _kind_in(obj.get("kind"))
    out = dict(obj)
    out["kind"] = kind
    if obj.get("z") is not None:
        out["z"] = tuple(
            tuple(token_to_scalar(x) for x in row) for row in obj["z"]
        )
    if obj.get("candidate") is not None:
        out["candidate"] = _rows_in(kind, obj["candidate"])
    if obj.get("expected") is not None:
        out["expected"] = _rows_in(kind, obj["expected"])
    return out
