from __future__ import annotations

from .syntax import TypeExpr


class Context:
    """An ordered list of typed variables with distinct names."""

    __slots__ = ("entries",)

    def __init__(self, entries=()):
        entries = tuple((str(n), t) for n, t in entries)
        names = [n for n, _ in entries]
        if len(set(names)) != len(names):
            raise ValueError(f"repeated variable in context {names}")
        self.entries = entries

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        return isinstance(other, Context) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return "Context(" + ", ".join(f"{n}:{t}" for n, t in self.entries) + ")"

    def names(self) -> tuple:
        return tuple(n for n, _ in self.entries)

    def as_set(self) -> frozenset:
        return frozenset(self.entries)

    def type_of(self, name: str) -> TypeExpr:
        for n, t in self.entries:
            if n == name:
                return t
        raise KeyError(name)

    def __contains__(self, name) -> bool:
        return any(n == name for n, _ in self.entries)

    def append(self, name: str, tau: TypeExpr) -> "Context":
        return Context(self.entries + ((name, tau),))

    def prepend(self, name: str, tau: TypeExpr) -> "Context":
        return Context(((name, tau),) + self.entries)

    def drop(self, name: str) -> "Context":
        return Context(e for e in self.entries if e[0] != name)

    def covers(self, free) -> bool:
        """True if every (name, type) in `free` is an entry."""
        return set(free) <= set(self.entries)

    def same_entries(self, other: "Context") -> bool:
        """Equality up to reordering."""
        return self.as_set() == other.as_set()
