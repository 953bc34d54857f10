"""JSON reading and writing for trees, maps, extensions and reports.

Output is byte-stable: keys keep insertion order, two-space indent, and a
trailing newline.  Lengths are written as integers or ``"p/q"`` strings.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

from .bounds import ExtractionReport
from .constructions import ExtensionResult
from .markov import MarkovError, MarkovMap, from_point_images
from .tree import EdgePoint, MetricTree, TreeError, VertexPoint, as_length, build_tree


def length_value(x: Fraction) -> int | str:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def tree_to_dict(tree: MetricTree) -> dict[str, Any]:
    return {
        "vertices": list(tree.vertices),
        "edges": [{"id": e.id, "from": e.u, "to": e.v, "len": length_value(e.length)}
                  for e in tree.edges],
    }


def tree_from_dict(data: Mapping) -> MetricTree:
    return build_tree(data)


def map_to_dict(f: MarkovMap, S: Sequence[str] | None = None) -> dict[str, Any]:
    out: dict[str, Any] = {
        "tree": tree_to_dict(f.tree),
        "marks": [{"id": v, "at": {"vertex": v}} for v in f.tree.vertices],
        "image": {v: f(v) for v in f.tree.vertices},
    }
    if S is not None:
        out["S"] = list(S)
    return out


def _point_from_dict(at: Mapping):
    if "vertex" in at:
        return VertexPoint(str(at["vertex"]))
    if "edge" in at and "offset" in at:
        return EdgePoint(str(at["edge"]), as_length(at["offset"]))
    raise TreeError(f"bad point description {dict(at)!r}")


def map_from_dict(data: Mapping) -> tuple[MarkovMap, tuple[str, ...] | None]:
    try:
        tree = tree_from_dict(data["tree"])
        marks = {str(m["id"]): _point_from_dict(m["at"]) for m in data["marks"]}
        image = {str(k): str(v) for k, v in data["image"].items()}
    except (KeyError, TypeError, AttributeError) as exc:
        raise MarkovError(f"malformed map file: {exc!r}") from None
    f = from_point_images(tree, marks, image)
    S = data.get("S")
    return f, (tuple(str(s) for s in S) if S is not None else None)


def extension_to_dict(ext: ExtensionResult) -> dict[str, Any]:
    out = map_to_dict(ext.map)
    out["base_S"] = list(ext.S_base)
    out["N"] = ext.N
    out["arc_roles"] = {str(i): ext.labels[i] for i in sorted(ext.labels)}
    out["defect"] = sorted(ext.defect)
    return out


def report_to_dict(rep: ExtractionReport) -> dict[str, Any]:
    return {
        "subtree": tree_to_dict(rep.subtree),
        "endpoints": list(rep.endpoints),
        "kind": rep.kind,
        "k": rep.k,
        "bound": rep.certified_bound,
    }


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2) + "\n"


def write_json(data: Any, path: str | Path) -> None:
    Path(path).write_text(dumps(data), encoding="utf-8")


def read_json(path: str | Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))
