"""Trees of finite sequences, rank functions, and budgeted branch search.

Nodes are tuples.  Labels are natural numbers, or pairs of naturals for trees
on N x N; a node of a pair tree is a tuple of ``(u_i, v_i)`` pairs.
"""
from dataclasses import dataclass

from .errors import NotFinite, ParseError, SequenceTooShort, TreeError

MAX_EXPLORED = 1_000_000


def _label_kind(label):
    if isinstance(label, bool):
        return None
    if isinstance(label, int) and label >= 0:
        return "nat"
    if isinstance(label, tuple) and len(label) == 2 and all(_label_kind(x) == "nat" for x in label):
        return "pair"
    return None


class Tree:
    """A hereditary set of finite sequences, explicit or generated.

    Explicit trees hold their node set.  Generated trees hold a ``children``
    callback returning the finitely many one-step extensions of a node, and
    always contain the empty sequence.
    """

    def __init__(self, nodes=None, children=None, pairs=False):
        if (nodes is None) == (children is None):
            raise ValueError("give exactly one of nodes or children")
        self.pairs = pairs
        self._callback = children
        self.nodes = None
        if nodes is not None:
            self.nodes = frozenset(tuple(n) for n in nodes)
            kinds = {_label_kind(x) for n in self.nodes for x in n}
            if None in kinds or len(kinds) > 1:
                raise TreeError("labels must be all naturals or all pairs of naturals")
            if kinds:
                self.pairs = kinds == {"pair"}
            for n in self.nodes:
                if n and n[:-1] not in self.nodes:
                    raise TreeError(f"node {n} has no parent in the tree")
            self._kids = {}
            for n in self.nodes:
                if n:
                    self._kids.setdefault(n[:-1], []).append(n)
            for v in self._kids.values():
                v.sort()

    @classmethod
    def explicit(cls, nodes, pairs=False):
        return cls(nodes=nodes, pairs=pairs)

    @classmethod
    def generated(cls, children, pairs=False):
        return cls(children=children, pairs=pairs)

    @property
    def is_explicit(self):
        return self.nodes is not None

    def __contains__(self, s):
        if self.is_explicit:
            return tuple(s) in self.nodes
        raise NotFinite("membership in a generated tree is not decidable here")

    def __len__(self):
        if not self.is_explicit:
            raise NotFinite("generated trees have no size")
        return len(self.nodes)

    def has_root(self):
        return not self.is_explicit or () in self.nodes

    def children(self, s):
        s = tuple(s)
        if self.is_explicit:
            return list(self._kids.get(s, ()))
        return sorted(s + (c,) for c in self._callback(s))


@dataclass(frozen=True)
class RankTable:
    ranks: dict
    root: int = None  # rank of the empty sequence, None for the empty tree

    def __getitem__(self, s):
        return self.ranks[tuple(s)]


def rank(t):
    """``rho(s) = 1 + max rho(child)``, 1 at leaves.

    Recursing over immediate children gives the same value as the sup over
    all proper extensions, because ranks strictly decrease along branches.
    """
    if not t.is_explicit:
        raise NotFinite("rank needs an explicit finite tree")
    ranks = {}
    for s in sorted(t.nodes, key=len, reverse=True):
        ranks[s] = 1 + max((ranks[c] for c in t.children(s)), default=0)
    return RankTable(ranks, ranks.get(()))


def rank_all_extensions(t):
    """Literal oracle: ``rho(s) = 1 + sup{rho(u) : s proper prefix of u, u in T}``.

    Nodes are finished longest first; each finished node pushes its rank to
    every proper prefix, so the sup runs over all extensions, not children.
    """
    if not t.is_explicit:
        raise NotFinite("rank needs an explicit finite tree")
    best = dict.fromkeys(t.nodes, 0)
    ranks = {}
    for u in sorted(t.nodes, key=len, reverse=True):
        ranks[u] = best[u] + 1
        for k in range(len(u)):
            if best[u[:k]] < ranks[u]:
                best[u[:k]] = ranks[u]
    return RankTable(ranks, ranks.get(()))


def rank_violations(t, table):
    """Pairs ``(s, u)`` with ``s`` a proper prefix of ``u`` and ``rho(s) <= rho(u)``."""
    bad = []
    for u in t.nodes:
        for k in range(len(u)):
            if table.ranks[u[:k]] <= table.ranks[u]:
                bad.append((u[:k], u))
    return bad


@dataclass(frozen=True)
class WellFounded:
    ranks: RankTable


@dataclass(frozen=True)
class Unknown:
    prefix: tuple  # deepest path explored


def _explore(t, budget):
    """Depth-first search to ``budget``; returns (explored nodes, blocking path)."""
    seen = []
    stack = [()] if t.has_root() else []
    while stack:
        s = stack.pop()
        seen.append(s)
        if len(seen) > MAX_EXPLORED:
            return seen, s
        kids = t.children(s)
        if kids and len(s) >= budget:
            return seen, s
        stack.extend(reversed(kids))
    return seen, None


def is_wellfounded(t, depth_budget=64):
    if t.is_explicit:
        return WellFounded(rank(t))
    seen, blocked = _explore(t, depth_budget)
    if blocked is not None:
        return Unknown(blocked)
    return WellFounded(rank(Tree.explicit(seen, pairs=t.pairs)))


def _x_at(x, i):
    if callable(x):
        return x(i)
    if i >= len(x):
        raise SequenceTooShort(f"x has length {len(x)}, position {i} is needed")
    return x[i]


def section_tree(t, x):
    """``T_x = {s : (x|len(s), s) in T}`` for a tree on N x N."""
    if t.is_explicit:
        if t.nodes and not t.pairs:
            raise TreeError("section trees need a tree on N x N")
        depth = max((len(n) for n in t.nodes), default=0)
        if not callable(x) and len(x) < depth:
            raise SequenceTooShort(f"x has length {len(x)} but the tree has depth {depth}")
        nodes = [tuple(v for _, v in n) for n in t.nodes
                 if all(u == _x_at(x, i) for i, (u, _) in enumerate(n))]
        return Tree.explicit(nodes)

    def children(s):
        pair_node = tuple((_x_at(x, i), v) for i, v in enumerate(s))
        xi = _x_at(x, len(s))
        return [v for (u, v) in (c[-1] for c in t.children(pair_node)) if u == xi]

    return Tree.generated(children)


@dataclass(frozen=True)
class WitnessBranch:
    prefix: tuple


@dataclass(frozen=True)
class NoBranchExhausted:
    explored: int


def analytic_membership(t, x, depth_budget=64):
    """Search ``T_x`` for a branch.

    A finite explicit tree has no infinite branch, so it answers
    NoBranchExhausted when its section fits in the budget and Unknown
    otherwise.  A generated tree answers WitnessBranch when a path of budget
    length still has a continuation, and NoBranchExhausted when the search
    runs out of nodes first.
    """
    tx = section_tree(t, x)
    if tx.is_explicit:
        depth = max((len(n) for n in tx.nodes), default=0)
        if depth <= depth_budget:
            return NoBranchExhausted(len(tx))
        return Unknown(max(tx.nodes, key=lambda n: (len(n), n))[:depth_budget])
    seen, blocked = _explore(tx, depth_budget)
    if blocked is None:
        return NoBranchExhausted(len(seen))
    if len(blocked) >= depth_budget:
        return WitnessBranch(blocked)
    return Unknown(blocked)


def parse_tree(text, path=None):
    """Parse a tree file: one node per line, comma-separated labels, ``a:b`` for pairs.

    A blank line or ``()`` denotes the empty sequence; lines starting with
    ``#`` are comments.
    """
    nodes = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if line in ("", "()"):
            nodes.append(())
            continue
        node = []
        col = raw.index(line[0]) + 1
        for field in line.split(","):
            token = field.strip()
            try:
                if ":" in token:
                    a, b = token.split(":")
                    label = (int(a), int(b))
                    if label[0] < 0 or label[1] < 0:
                        raise ValueError
                else:
                    label = int(token)
                    if label < 0:
                        raise ValueError
            except ValueError:
                raise ParseError(f"bad label {token!r}", lineno, col, path) from None
            node.append(label)
            col += len(field) + 1
        nodes.append(tuple(node))
    try:
        return Tree.explicit(set(nodes))
    except TreeError as exc:
        raise ParseError(str(exc), path=path) from exc
