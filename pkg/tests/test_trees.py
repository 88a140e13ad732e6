from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opalg import trees
from opalg.errors import NotFinite, ParseError, SequenceTooShort, TreeError
from opalg.trees import NoBranchExhausted, Tree, Unknown, WellFounded, WitnessBranch


def random_tree(rng, max_nodes=200, max_label=3):
    nodes = {()}
    frontier = [()]
    target = int(rng.integers(1, max_nodes + 1))
    while len(nodes) < target and frontier:
        s = frontier[int(rng.integers(len(frontier)))]
        child = s + (int(rng.integers(max_label)),)
        if child not in nodes:
            nodes.add(child)
            frontier.append(child)
        elif rng.random() < 0.05:
            frontier.remove(s)
    return Tree.explicit(nodes)


def full_tree(depth, labels=(0, 1)):
    return Tree.explicit([s for k in range(depth + 1) for s in product(labels, repeat=k)])


def test_rank_examples():
    assert trees.rank(Tree.explicit([()])).root == 1
    table = trees.rank(Tree.explicit([(), (0,)]))
    assert table[(0,)] == 1 and table.root == 2
    for k in range(11):
        assert trees.rank(full_tree(k)).root == k + 1


def test_empty_tree_rank():
    assert trees.rank(Tree.explicit([])).root is None


def test_tree_validation():
    with pytest.raises(TreeError):
        Tree.explicit([(), (0, 1)])
    with pytest.raises(TreeError):
        Tree.explicit([(), (0,), ((0, 1),)])
    with pytest.raises(NotFinite):
        trees.rank(Tree.generated(lambda s: [0]))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rank_properties(seed):
    rng = np.random.default_rng(seed)
    t = random_tree(rng)
    table = trees.rank(t)
    assert trees.rank_violations(t, table) == []
    assert table.ranks == trees.rank_all_extensions(t).ranks
    assert isinstance(trees.is_wellfounded(t, 8), WellFounded)
    shuffled = list(t.nodes)
    rng.shuffle(shuffled)
    assert trees.rank(Tree.explicit(shuffled)).ranks == table.ranks


def test_wellfounded_generated():
    res = trees.is_wellfounded(Tree.generated(lambda s: [0]), 7)
    assert isinstance(res, Unknown) and res.prefix == (0,) * 7
    res = trees.is_wellfounded(Tree.generated(lambda s: [] if len(s) >= 3 else [0, 1]), 10)
    assert isinstance(res, WellFounded) and res.ranks.root == 4


def _diagonal():
    return Tree.generated(lambda s: [(u, u) for u in range(4)], pairs=True)


def test_section_trees():
    assert len(trees.section_tree(Tree.explicit([]), [1])) == 0
    pairs = [(a, b) for a in range(2) for b in range(2)]
    full = Tree.explicit([s for k in range(3) for s in product(pairs, repeat=k)])
    assert trees.section_tree(full, [1, 0]).nodes == full_tree(2).nodes
    diag = Tree.explicit([tuple((u, u) for u in s) for k in range(4) for s in product(range(2), repeat=k)])
    assert sorted(trees.section_tree(diag, [1, 0, 1]).nodes) == [(), (1,), (1, 0), (1, 0, 1)]
    with pytest.raises(SequenceTooShort):
        trees.section_tree(diag, [1])


@pytest.mark.parametrize("budget", [1, 4, 16])
def test_diagonal_witness(budget):
    x = [3, 1, 2, 0] * 5
    res = trees.analytic_membership(_diagonal(), x, budget)
    assert isinstance(res, WitnessBranch) and res.prefix == tuple(x[:budget])


def test_analytic_membership_outcomes():
    assert isinstance(trees.analytic_membership(Tree.explicit([]), [0]), NoBranchExhausted)
    pruned = Tree.explicit([tuple((0, b) for b in s) for k in range(6) for s in product((0, 1), repeat=k)])
    assert isinstance(trees.analytic_membership(pruned, [0] * 5, 3), Unknown)
    res = trees.analytic_membership(pruned, [0] * 5, 8)
    assert isinstance(res, NoBranchExhausted)
    assert isinstance(trees.is_wellfounded(trees.section_tree(pruned, [0] * 5)), WellFounded)


def test_generated_exhaustion_consistency():
    # children stop after depth 2 for every x
    t = Tree.generated(lambda s: [] if len(s) >= 2 else [(0, 0), (1, 1), (0, 1)], pairs=True)
    x = [0, 1, 1]
    res = trees.analytic_membership(t, x, 10)
    assert isinstance(res, NoBranchExhausted)
    assert isinstance(trees.is_wellfounded(trees.section_tree(t, x), 10), WellFounded)


def test_parse_tree():
    t = trees.parse_tree("()\n0\n0,1\n1\n")
    assert trees.rank(t).root == 3
    t = trees.parse_tree("\n0:1\n0:1, 2:3\n")
    assert t.pairs and (((0, 1), (2, 3))) in t
    with pytest.raises(ParseError) as exc:
        trees.parse_tree("()\n0,x\n", path="t.txt")
    assert exc.value.line == 2 and exc.value.column == 3
    with pytest.raises(ParseError):
        trees.parse_tree("()\n0,1\n")
