"""Regenerate the shipped corpus from the lemma library and a few diagrams."""
from __future__ import annotations

import sys
from pathlib import Path

from toposlang.colimits import DiagramSpec
from toposlang.lemmas import LIBRARY_SIGNATURE, lemma_library
from toposlang.surface import show_diagram, show_lemma, show_signature

DIAGRAMS = {
    "coproduct": (
        ("A", "B"), (),
        {"A": ["a0", "a1"], "B": ["b0", "b1", "b2"]}, {},
    ),
    "coequalizer": (
        ("A", "B"), (("f", "A", "B"), ("g", "A", "B")),
        {"A": [0, 1, 2], "B": ["x", "y", "z", "w"]},
        {"f": {0: "x", 1: "y", 2: "z"}, "g": {0: "y", 1: "x", 2: "z"}},
    ),
    "pushout": (
        ("A", "B", "C"), (("f", "A", "B"), ("g", "A", "C")),
        {"A": [0, 1], "B": [0, 1, 2], "C": [0, 1]},
        {"f": {0: 0, 1: 1}, "g": {0: 0, 1: 0}},
    ),
    "cycle": (
        ("A", "B"), (("f", "A", "B"), ("g", "B", "A")),
        {"A": [0, 1, 2], "B": [0, 1]},
        {"f": {0: 0, 1: 1, 2: 1}, "g": {0: 2, 1: 0}},
    ),
    "single_object": (
        ("A",), (("s", "A", "A"),),
        {"A": [0, 1, 2, 3]},
        {"s": {0: 1, 1: 0, 2: 3, 3: 3}},
    ),
}


def main(root: str = "corpus") -> None:
    base = Path(root)
    lib = lemma_library()
    body = "\n\n".join(show_lemma(n, lem.statement, lem.tree, lem.hypotheses) for n, lem in lib.items())
    header = "; the lemma library, one (lemma ...) form per lemma\n"
    (base / "proofs" / "library.sexp").write_text(header + show_signature(LIBRARY_SIGNATURE) + "\n\n" + body + "\n")
    for name, (objects, morphisms, sets, tables) in DIAGRAMS.items():
        spec = DiagramSpec(objects, morphisms)
        env = spec.environment(sets, tables)
        (base / "diagrams" / f"{name}.sexp").write_text(show_diagram(spec, env) + "\n")


if __name__ == "__main__":
    main(*sys.argv[1:])
