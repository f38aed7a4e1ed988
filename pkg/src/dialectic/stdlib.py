"""Bundled data: the base theorem store and the shipped libraries."""

from __future__ import annotations

import importlib.resources as resources

from .kernel import TheoremStore, load_store_text
from .library import Library, library_from_json


def _data(name: str) -> str:
    return resources.files("dialectic").joinpath(f"data/{name}").read_text(
        encoding="utf-8")


def base_store() -> TheoremStore:
    """The documented axiom/lemma bundle the kernel ships with."""
    return load_store_text(_data("base_theorems.txt"))


def bundled_library(name: str) -> Library:
    """A library shipped with the package: `logic` or `tutorial`."""
    import json
    return library_from_json(json.loads(_data(f"{name}.json")))


BUNDLED_LIBRARIES = ("logic", "tutorial")
