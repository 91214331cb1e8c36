"""Bundled real-world networks.

Only networks whose data could be redistributed with the package are
included. ``load`` raises :class:`DatasetUnavailable` for the others so
callers can point the loader at a local copy instead (``path=``).
"""

from __future__ import annotations

from importlib import resources

from .graph import Graph, parse_edge_list, read_graph

BUNDLED = {
    "karate": "karate.txt",
    "les_miserables": "les_miserables.txt",
}

# known reference networks that are not shipped; load them from a file
EXTERNAL = ("dolphins", "football")


class DatasetUnavailable(LookupError):
    pass


def names() -> list[str]:
    return sorted(BUNDLED)


def load(name: str, path=None, fmt: str | None = None) -> Graph:
    if path is not None:
        return read_graph(path, fmt)
    if name not in BUNDLED:
        hint = " (not bundled; pass path=)" if name in EXTERNAL else ""
        raise DatasetUnavailable(f"unknown dataset {name!r}{hint}")
    text = resources.files(__package__).joinpath("data", BUNDLED[name]).read_text()
    return parse_edge_list(text)
