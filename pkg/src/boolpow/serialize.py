"""JSON round-trips for the public value types."""

from __future__ import annotations

from .algebra import FiniteAlgebra, from_json as algebra_from_json, to_json as algebra_to_json
from .cantor import Clopen, Point, PointContext, Table, TailClopen
from .fraisse import PowerEmbedding
from .homeo import EPHomeo, TailPiece
from .power import PowerContext, PowerCongruence, PowerElement


def clopen_to_obj(b: Clopen):
    return list(b.words)


def clopen_from_obj(obj) -> Clopen:
    return Clopen.make(obj)


def point_to_obj(x: Point):
    return {"pre": x.pre, "per": x.per}


def point_from_obj(obj) -> Point:
    return Point.make(obj["pre"], obj["per"])


def tailclopen_to_obj(c: TailClopen):
    return {
        "threshold": c.threshold,
        "exceptional": clopen_to_obj(c.exceptional),
        "tails": [
            {"branch": i + 1, "word": w} for i, w in enumerate(c.tails)
        ],
    }


def tailclopen_from_obj(ctx: PointContext, obj) -> TailClopen:
    tails = [None] * ctx.n
    for t in obj["tails"]:
        tails[t["branch"] - 1] = t["word"]
    return TailClopen.make(
        ctx, obj["threshold"], clopen_from_obj(obj["exceptional"]), tails
    )


def homeo_to_obj(h: EPHomeo):
    return {
        "pairs": [[p, q] for p, q in h.pairs],
        "tails": [
            {
                "branch": p.branch,
                "target": p.target,
                "modulus": p.step,
                "affine": [p.first, p.ifirst, p.istep],
                "cellmaps": [[u, v] for u, v in p.cellmap.pairs],
            }
            for p in h.pieces
        ],
    }


def homeo_from_obj(ctx: PointContext, obj) -> EPHomeo:
    pieces = []
    for t in obj["tails"]:
        first, ifirst, istep = t["affine"]
        pieces.append(
            TailPiece(
                t["branch"],
                first,
                t["modulus"],
                t["target"],
                ifirst,
                istep,
                Table.make(t["cellmaps"]),
            )
        )
    return EPHomeo.make(ctx, [tuple(p) for p in obj["pairs"]], pieces)


def element_to_obj(f: PowerElement):
    return {"cells": [{"prefix": w, "label": a} for w, a in f.cells]}


def element_from_obj(ctx: PowerContext, obj) -> PowerElement:
    return PowerElement.make(
        ctx, [(c["prefix"], c["label"]) for c in obj["cells"]]
    )


def congruence_to_obj(t: PowerCongruence):
    return {"support": clopen_to_obj(t.support)}


def congruence_from_obj(ctx: PowerContext, obj) -> PowerCongruence:
    return PowerCongruence(ctx, clopen_from_obj(obj["support"]))


def embedding_to_obj(e: PowerEmbedding):
    coords = []
    for c in e.coords:
        if c[0] == "aut":
            coords.append({"aut": list(c[1]), "src": c[2]})
        else:
            coords.append({"idem": c[1]})
    return {"u": e.u, "v": e.v, "coords": coords}


def embedding_from_obj(algebra: FiniteAlgebra, obj) -> PowerEmbedding:
    coords = []
    for c in obj["coords"]:
        if "idem" in c:
            coords.append(("idem", c["idem"]))
        else:
            coords.append(("aut", tuple(c["aut"]), c["src"]))
    return PowerEmbedding.make(algebra, obj["u"], coords)
