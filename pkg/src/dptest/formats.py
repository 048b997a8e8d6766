"""JSON file formats for domains, tables, graphs and strings.

* domain: ``{"n": int, "sets": [[int, ...], ...]}``
* table: ``{"domain_hash": sha256, "values": [[bit, ...], ...]}``, optionally
  with the full ``"domain"`` embedded so the file stands alone
* test graph: ``{"domain": <domain>, "edges": [[s, s', w], ...]}`` with each
  undirected edge listed once
* simple graph: ``{"n": int, "edges": [[u, v], ...]}`` with vertices 1..n
* string: ``{"bits": [bit, ...]}``, a bare list, or a string of 0/1 characters
"""

from __future__ import annotations

import json
from pathlib import Path

from .amplify import SimpleGraph
from .core import Domain, DPTable, as_bits
from .errors import InvalidArgument
from .testgraph import TestGraph, build_from_edges


def dump_json(obj, path) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text)


def load_json(path):
    return json.loads(Path(path).read_text())


def domain_to_json(dom: Domain) -> dict:
    return {"n": dom.n, "sets": [list(s) for s in dom.sets]}


def domain_from_json(obj) -> Domain:
    if "domain" in obj and "sets" not in obj:
        obj = obj["domain"]
    try:
        return Domain(int(obj["n"]), tuple(tuple(s) for s in obj["sets"]))
    except KeyError as exc:
        raise InvalidArgument(f"domain JSON is missing {exc}") from None


def table_to_json(F: DPTable, embed_domain: bool = True) -> dict:
    out = {"domain_hash": F.domain.digest(),
           "values": [list(v) for v in F.values]}
    if embed_domain:
        out["domain"] = domain_to_json(F.domain)
    return out


def table_from_json(obj, dom: Domain | None = None) -> DPTable:
    if dom is None:
        if "domain" not in obj:
            raise InvalidArgument("table has no embedded domain; pass one explicitly")
        dom = domain_from_json(obj["domain"])
    expected = obj.get("domain_hash")
    if expected is not None and expected != dom.digest():
        raise InvalidArgument("table was written for a different domain")
    return DPTable.from_values(dom, obj["values"])


def graph_to_json(graph: TestGraph) -> dict:
    return {"domain": domain_to_json(graph.dom),
            "edges": [list(e) for e in graph.edge_list()]}


def graph_from_json(obj) -> TestGraph:
    return build_from_edges(domain_from_json(obj["domain"]), obj["edges"])


def simple_graph_to_json(graph: SimpleGraph) -> dict:
    return {"n": graph.n, "edges": [[u + 1, v + 1] for u, v in graph.edges]}


def simple_graph_from_json(obj) -> SimpleGraph:
    return SimpleGraph.from_edges(int(obj["n"]), ((u - 1, v - 1) for u, v in obj["edges"]))


def bits_from_json(obj, n: int | None = None):
    if isinstance(obj, dict):
        obj = obj["bits"]
    if isinstance(obj, str):
        obj = [int(ch) for ch in obj.strip()]
    return as_bits(obj, n)


def bits_to_json(bits) -> dict:
    return {"bits": [int(b) for b in bits]}
