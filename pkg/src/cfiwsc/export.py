"""Export colored graphs for external isomorphism tools (DIMACS, dreadnaut)."""

from __future__ import annotations

from pathlib import Path

from .errors import NonGraphInput
from .structures import ColoredGraph, RelStructure


def _require_graph(g: RelStructure) -> None:
    if not g.is_binary_graph:
        rels = ", ".join(f"{k} (arity {r.arity})" for k, r in g.relations.items()) or "none"
        raise NonGraphInput(
            f"only colored graphs can be exported; this structure has relations {rels}. "
            "Export a single symmetric binary relation E instead, for example the CFI part "
            "of a gluing via `cfiwsc glue extract`."
        )


def _write(text: str, path) -> str:
    if path is not None:
        Path(path).write_text(text)
    return text


def dimacs_text(g: RelStructure) -> str:
    """``p edge n m``, one ``n v c`` line per vertex, then each edge once (1-based, sorted)."""
    _require_graph(g)
    edges = sorted((a, b) for a, b in g.relations["E"].tuples if a < b)
    col = g.color_of
    lines = [f"p edge {g.n} {len(edges)}"]
    lines += [f"n {v + 1} {col[v]}" for v in range(g.n)]
    lines += [f"e {a + 1} {b + 1}" for a, b in edges]
    return "\n".join(lines) + "\n"


def export_dimacs(g: RelStructure, path=None) -> str:
    return _write(dimacs_text(g), path)


def import_dimacs(text: str) -> ColoredGraph:
    """Read the DIMACS dialect written by :func:`export_dimacs`."""
    n = None
    colors: dict[int, int] = {}
    edges = []
    for raw in text.splitlines():
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            n = int(parts[2])
        elif parts[0] == "n":
            colors[int(parts[1]) - 1] = int(parts[2])
        elif parts[0] == "e":
            edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
    if n is None:
        raise ValueError("missing 'p edge' header")
    values = sorted(set(colors.values()) | ({0} if len(colors) < n else set()))
    classes = [[v for v in range(n) if colors.get(v, 0) == c] for c in values]
    return ColoredGraph.from_edges(n, edges, [c for c in classes if c])


def dreadnaut_text(g: RelStructure) -> str:
    """dreadnaut input: 0-based adjacency lists and the color partition."""
    _require_graph(g)
    nb = g.neighbors
    lines = [f"n={g.n} $=0 g"]
    for v in range(g.n):
        later = " ".join(str(u) for u in nb[v] if u > v)
        lines.append(f"{v} : {later};" if later else f"{v} : ;")
    lines.append(".")
    cells = "|".join(",".join(str(v) for v in cls) for cls in g.colors)
    lines.append(f"f=[{cells}]")
    return "\n".join(lines) + "\n"


def export_dreadnaut(g: RelStructure, path=None) -> str:
    return _write(dreadnaut_text(g), path)
