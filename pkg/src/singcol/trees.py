"""Resolution trees of infinitely near points and the delta-constant gluing."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .catalog import TypeName
from .errors import PreconditionError, UnsupportedCaseError
from .invariants import InvariantRecord

Path = tuple[int, ...]


@dataclass(frozen=True)
class ResolutionTree:
    m: int
    children: tuple["ResolutionTree", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if self.m < 1:
            raise ValueError("multiplicities are at least 1")
        for c in self.children:
            if c.m > self.m:
                raise ValueError(f"multiplicity increases from {self.m} to {c.m}")

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def vertices(self):
        """(path, vertex) pairs in depth-first order."""
        stack: list[tuple[Path, ResolutionTree]] = [((), self)]
        while stack:
            path, v = stack.pop()
            yield path, v
            for i in reversed(range(len(v.children))):
                stack.append((path + (i,), v.children[i]))

    def at(self, path: Path) -> "ResolutionTree":
        v = self
        for i in path:
            v = v.children[i]
        return v

    def replace(self, path: Path, new: "ResolutionTree") -> "ResolutionTree":
        if not path:
            return new
        i = path[0]
        kids = list(self.children)
        kids[i] = kids[i].replace(path[1:], new)
        return ResolutionTree(self.m, tuple(kids))

    def leaf_count(self) -> int:
        return sum(1 for _, v in self.vertices() if v.is_leaf)

    def to_json(self) -> dict:
        out: dict = {"m": self.m}
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        return out

    @classmethod
    def from_json(cls, data) -> "ResolutionTree":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["m"]), tuple(cls.from_json(c) for c in data.get("children", ())))


def leaf() -> ResolutionTree:
    return ResolutionTree(1)


def tree_invariants(t: ResolutionTree) -> InvariantRecord:
    delta = sum(v.m * (v.m - 1) // 2 for _, v in t.vertices())
    r = t.leaf_count()
    return InvariantRecord.from_mu(t.m, 2 * delta - r + 1, r)


@dataclass(frozen=True)
class GlueSpec:
    path: Path
    free_leaves: tuple[int, ...]  # child indices of the multiplicity-1 leaves


def find_potentially_free(t: ResolutionTree, k: int) -> GlueSpec | None:
    """Deepest, then leftmost, vertex with at least k smooth leaf children."""
    if k < 1:
        raise ValueError("k must be positive")
    best: GlueSpec | None = None
    for path, v in t.vertices():
        leaves = tuple(i for i, c in enumerate(v.children) if c.is_leaf and c.m == 1)
        if len(leaves) >= k and (best is None or len(path) > len(best.path)):
            best = GlueSpec(path, leaves)
    return best


@dataclass
class GlueReport:
    tree: ResolutionTree
    invariants: InvariantRecord
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"tree": self.tree.to_json(), "invariants": self.invariants.to_json(),
                "checks": dict(self.checks)}


def delta_const_collide(t_x: ResolutionTree, t_y: ResolutionTree) -> GlueReport:
    """Replace m_y free leaves of t_x by a copy of t_y."""
    if t_x.m < t_y.m:
        raise PreconditionError(f"mult(S_x)={t_x.m} < mult(S_y)={t_y.m}")
    spec = find_potentially_free(t_x, t_y.m)
    if spec is None:
        raise PreconditionError(f"no vertex of the first tree has {t_y.m} free smooth branches")
    v = t_x.at(spec.path)
    drop = set(spec.free_leaves[: t_y.m])
    kids = [c for i, c in enumerate(v.children) if i not in drop] + [t_y]
    result = t_x.replace(spec.path, ResolutionTree(v.m, tuple(kids)))

    ix, iy, inv = tree_invariants(t_x), tree_invariants(t_y), tree_invariants(result)
    checks = {
        "delta_f = delta_x + delta_y": inv.delta == ix.delta + iy.delta,
        "m_f = m_x": inv.mult == ix.mult,
        "mu_f = mu_x + mu_y - 1 + m_y": inv.mu == ix.mu + iy.mu - 1 + iy.mult,
        "r_f = r_x + r_y - m_y": inv.r == ix.r + iy.r - iy.mult,
    }
    return GlueReport(result, inv, checks)


# --- trees of catalog types --------------------------------------------------


def _after_blowup_a(n: int) -> list[ResolutionTree]:
    """Strict transforms of an A_n germ after one blow-up."""
    if n == 1:
        return [leaf(), leaf()]
    if n == 2:
        return [leaf()]
    return [ResolutionTree(2, tuple(_after_blowup_a(n - 2)))]


def tree_a(k: int) -> ResolutionTree:
    return ResolutionTree(2, tuple(_after_blowup_a(k)))


def tree_d(k: int) -> ResolutionTree:
    return ResolutionTree(3, tuple([leaf()] + _after_blowup_a(k - 3)))


def tree_omp(m: int) -> ResolutionTree:
    return ResolutionTree(m, tuple(leaf() for _ in range(m)))


def tree_j10() -> ResolutionTree:
    return ResolutionTree(3, (tree_omp(3),))


def tree_of(name: TypeName) -> ResolutionTree:
    s, ix = name.series, name.indices
    if s == "A":
        return tree_a(ix[0])
    if s == "D":
        return tree_d(ix[0])
    if s == "OMP":
        return tree_omp(ix[0])
    if s == "J" and ix == (2, 0):
        return tree_j10()
    if s == "X" and ix == (1, 0):
        return tree_omp(4)
    raise UnsupportedCaseError(f"no stored tree for {name}; pass the tree explicitly")
