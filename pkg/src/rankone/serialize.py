"""JSON forms of scalars, vectors, diagonal symbols and operator expressions.

* complex: ``[re, im]`` (a bare real number is also accepted on input)
* vector: ``{"prefix": [c, ...], "tails": [{"scale": c, "ratio": c}, ...]}``
* diagonal: ``{"prefix": [c, ...], "tail": {"scale": c, "ratio": c}}`` or
  ``{"prefix": [...], "constant": c}``
* operator: ``{"kind": "shift_pow" | "diagonal" | "rank_one" | "sum" | "compose" |
  "adjoint" | "scale" | "identity", ...}``

Parse failures raise :class:`ParseError` naming the offending field path.
"""
from __future__ import annotations

import math
from numbers import Real

from .errors import ParseError
from .operators import Adjoint, Compose, Diagonal, Identity, OperatorExpr, RankOne, Scale, ShiftPow, Sum
from .seqcore import DiagonalSymbol, GeomTail, GeomTailSeq


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def _num(x: float):
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def complex_from_json(obj, where: str) -> complex:
    if isinstance(obj, bool):
        raise ParseError(f"{where}: expected [re, im], got a boolean")
    if isinstance(obj, Real):
        z = complex(float(obj))
    elif isinstance(obj, (list, tuple)) and len(obj) == 2 and all(
        isinstance(x, Real) and not isinstance(x, bool) for x in obj
    ):
        z = complex(float(obj[0]), float(obj[1]))
    else:
        raise ParseError(f"{where}: malformed complex literal {obj!r}, expected [re, im]")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ParseError(f"{where}: complex value must be finite")
    return z


def _get(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    if key not in obj:
        raise ParseError(f"{where}.{key}: missing field")
    return obj[key]


def vector_to_json(v: GeomTailSeq) -> dict:
    return {
        "prefix": [complex_to_json(x) for x in v.prefix],
        "tails": [{"scale": complex_to_json(t.scale), "ratio": complex_to_json(t.ratio)} for t in v.tails],
    }


def vector_from_json(obj, where: str) -> GeomTailSeq:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected a vector object with 'prefix' and 'tails'")
    unknown = set(obj) - {"prefix", "tails"}
    if unknown:
        raise ParseError(f"{where}: unknown vector fields {sorted(unknown)}")
    prefix = obj.get("prefix", [])
    tails = obj.get("tails", [])
    if not isinstance(prefix, list):
        raise ParseError(f"{where}.prefix: expected a list")
    if not isinstance(tails, list):
        raise ParseError(f"{where}.tails: expected a list")
    pre = tuple(complex_from_json(x, f"{where}.prefix[{i}]") for i, x in enumerate(prefix))
    ts = tuple(
        GeomTail(
            complex_from_json(_get(t, "scale", f"{where}.tails[{i}]"), f"{where}.tails[{i}].scale"),
            complex_from_json(_get(t, "ratio", f"{where}.tails[{i}]"), f"{where}.tails[{i}].ratio"),
        )
        for i, t in enumerate(tails)
    )
    return GeomTailSeq(pre, ts)


def diagonal_to_json(d: DiagonalSymbol) -> dict:
    return {
        "prefix": [complex_to_json(x) for x in d.prefix],
        "tail": {"scale": complex_to_json(d.scale), "ratio": complex_to_json(d.ratio)},
    }


def diagonal_from_json(obj, where: str) -> DiagonalSymbol:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected a diagonal object")
    prefix = obj.get("prefix", [])
    if not isinstance(prefix, list):
        raise ParseError(f"{where}.prefix: expected a list")
    pre = tuple(complex_from_json(x, f"{where}.prefix[{i}]") for i, x in enumerate(prefix))
    if "constant" in obj and "tail" in obj:
        raise ParseError(f"{where}: give either 'constant' or 'tail', not both")
    if "constant" in obj:
        return DiagonalSymbol(pre, complex_from_json(obj["constant"], f"{where}.constant"), 1)
    tail = _get(obj, "tail", where)
    return DiagonalSymbol(
        pre,
        complex_from_json(_get(tail, "scale", f"{where}.tail"), f"{where}.tail.scale"),
        complex_from_json(_get(tail, "ratio", f"{where}.tail"), f"{where}.tail.ratio"),
    )


def operator_to_json(op: OperatorExpr) -> dict:
    if isinstance(op, Identity):
        return {"kind": "identity"}
    if isinstance(op, ShiftPow):
        return {"kind": "shift_pow", "p": op.p}
    if isinstance(op, Diagonal):
        return {"kind": "diagonal", "d": diagonal_to_json(op.d)}
    if isinstance(op, RankOne):
        return {"kind": "rank_one", "f": vector_to_json(op.f), "g": vector_to_json(op.g)}
    if isinstance(op, Scale):
        return {"kind": "scale", "lambda": complex_to_json(op.lam), "inner": operator_to_json(op.inner)}
    if isinstance(op, Sum):
        return {"kind": "sum", "terms": [operator_to_json(t) for t in op.terms]}
    if isinstance(op, Compose):
        return {"kind": "compose", "left": operator_to_json(op.left), "right": operator_to_json(op.right)}
    if isinstance(op, Adjoint):
        return {"kind": "adjoint", "inner": operator_to_json(op.inner)}
    raise TypeError(f"not an operator expression: {op!r}")


def operator_from_json(obj, where: str = "op") -> OperatorExpr:
    kind = _get(obj, "kind", where)
    if kind == "identity":
        return Identity()
    if kind == "shift_pow":
        p = _get(obj, "p", where)
        if not isinstance(p, int) or isinstance(p, bool) or p < 0:
            raise ParseError(f"{where}.p: expected a nonnegative integer")
        return ShiftPow(p)
    if kind == "diagonal":
        return Diagonal(diagonal_from_json(_get(obj, "d", where), f"{where}.d"))
    if kind == "rank_one":
        return RankOne(
            vector_from_json(_get(obj, "f", where), f"{where}.f"),
            vector_from_json(_get(obj, "g", where), f"{where}.g"),
        )
    if kind == "scale":
        return Scale(
            complex_from_json(_get(obj, "lambda", where), f"{where}.lambda"),
            operator_from_json(_get(obj, "inner", where), f"{where}.inner"),
        )
    if kind == "sum":
        terms = _get(obj, "terms", where)
        if not isinstance(terms, list):
            raise ParseError(f"{where}.terms: expected a list")
        return Sum(tuple(operator_from_json(t, f"{where}.terms[{i}]") for i, t in enumerate(terms)))
    if kind == "compose":
        return Compose(
            operator_from_json(_get(obj, "left", where), f"{where}.left"),
            operator_from_json(_get(obj, "right", where), f"{where}.right"),
        )
    if kind == "adjoint":
        return Adjoint(operator_from_json(_get(obj, "inner", where), f"{where}.inner"))
    raise ParseError(f"{where}.kind: unknown operator kind {kind!r}")
