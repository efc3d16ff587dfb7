# pgm_bench/dot.py
# Version: 1.0.1

import re
from typing import Mapping, Optional, Tuple

from .graph import MixedGraph

_PLAIN_ID = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _quote(name: str) -> str:
    if _PLAIN_ID.match(name):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(g: MixedGraph, styles: Optional[Mapping[Tuple[str, str], str]] = None) -> str:
    """DOT-Darstellung: gerichtete Kanten 'A -> B;', ungerichtete 'A -> B [dir=none];'.

    styles ordnet einer Kante (tail, head) zusätzliche Attribute zu, z.B. "style=dotted".
    """
    styles = styles or {}
    lines = ["digraph g {"]
    lines += [f"  {_quote(v)};" for v in sorted(g.nodes)]
    for edge in sorted(g.edges, key=lambda e: (e.tail, e.head)):
        attrs = [] if edge.directed else ["dir=none"]
        extra = styles.get((edge.tail, edge.head)) or styles.get((edge.head, edge.tail))
        if extra:
            attrs.append(extra)
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_quote(edge.tail)} -> {_quote(edge.head)}{suffix};")
    return "\n".join(lines) + "\n}\n"
