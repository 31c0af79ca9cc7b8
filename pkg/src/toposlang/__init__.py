"""Internal language of the topos of finite sets: syntax, proofs, semantics, colimits."""

__version__ = "0.1.0"
