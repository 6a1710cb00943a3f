"""Expression trees over the primitive set used to compose benchmark functions.

A tree is built from three immutable node types: :class:`Op` (an operator
with children), :class:`Var` (input coordinate ``x<i>``) and :class:`Const`
(an integer in ``[-10, 10]``).  Trees double as vectorised functions: see
:func:`evaluate_batch`.

Text form is an s-expression, e.g. ``(add x0 (mul 3 x1))``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Union

import numpy as np

OPERATORS: dict[str, int] = {
    "add": 2,
    "sub": 2,
    "mul": 2,
    "neg": 1,
    "sqrt": 1,
    "sin": 1,
    "cos": 1,
}
_OP_NAMES = tuple(OPERATORS)

CONST_MIN, CONST_MAX = -10, 10
MAX_HEIGHT = 10
INIT_HEIGHT = (3, 6)
MUTATION_HEIGHT = 4


@dataclass(frozen=True)
class Domain:
    """Box ``[lower, upper]^dimension``."""

    lower: float = -5.0
    upper: float = 5.0
    dimension: int = 2

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"lower ({self.lower}) must be < upper ({self.upper})")
        if self.dimension < 1:
            raise ValueError("dimension must be positive")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size=(n, self.dimension))

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def with_dimension(self, dimension: int) -> "Domain":
        return Domain(self.lower, self.upper, dimension)


@dataclass(frozen=True)
class Var:
    index: int

    height = 1
    size = 1

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True)
class Const:
    value: int

    height = 1
    size = 1

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Op:
    name: str
    children: tuple

    @cached_property
    def height(self) -> int:
        return 1 + max(c.height for c in self.children)

    @cached_property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children)

    def __str__(self):
        return "(" + " ".join([self.name, *map(str, self.children)]) + ")"


Node = Union[Op, Var, Const]


def to_sexpr(tree: Node) -> str:
    """Canonical s-expression text of ``tree``."""
    return str(tree)


def variables(tree: Node) -> set[int]:
    """Indices of all variables referenced by ``tree``."""
    return {n.index for _, n in iter_nodes(tree) if isinstance(n, Var)}


def iter_nodes(tree: Node, path: tuple = ()) -> Iterator[tuple[tuple, Node]]:
    """Yield ``(path, node)`` in preorder; ``path`` is a tuple of child indices."""
    yield path, tree
    if isinstance(tree, Op):
        for i, child in enumerate(tree.children):
            yield from iter_nodes(child, path + (i,))


def subtree_at(tree: Node, path: tuple) -> Node:
    for i in path:
        tree = tree.children[i]
    return tree


def replace_at(tree: Node, path: tuple, new: Node) -> Node:
    """Return a copy of ``tree`` with the subtree at ``path`` replaced by ``new``."""
    if not path:
        return new
    i, rest = path[0], path[1:]
    children = list(tree.children)
    children[i] = replace_at(children[i], rest, new)
    return Op(tree.name, tuple(children))


# -- evaluation ---------------------------------------------------------------

def _sqrt_abs(a):
    return np.sqrt(np.abs(a))


_UFUNCS = {
    "add": np.add,
    "sub": np.subtract,
    "mul": np.multiply,
    "neg": np.negative,
    "sqrt": _sqrt_abs,
    "sin": np.sin,
    "cos": np.cos,
}


def _eval(node: Node, X: np.ndarray):
    if isinstance(node, Var):
        return X[:, node.index]
    if isinstance(node, Const):
        return float(node.value)
    return _UFUNCS[node.name](*[_eval(c, X) for c in node.children])


def evaluate_batch(tree: Node, X) -> np.ndarray:
    """Evaluate ``tree`` on every row of ``X`` (shape ``(n, D)``).

    Overflow is not an error: non-finite values are returned as-is and
    callers decide how to treat them.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    with np.errstate(all="ignore"):
        out = _eval(tree, X)
    return np.array(np.broadcast_to(out, (X.shape[0],)), dtype=float)


def evaluate(tree: Node, point=()) -> float:
    """Evaluate ``tree`` at a single point."""
    point = np.asarray(point, dtype=float).reshape(1, -1)
    return float(evaluate_batch(tree, point)[0])


# -- random construction ------------------------------------------------------

def _terminal(rng: np.random.Generator, n_vars: int) -> Node:
    # one slot per variable plus one slot for a fresh integer constant
    k = int(rng.integers(n_vars + 1))
    if k < n_vars:
        return Var(k)
    return Const(int(rng.integers(CONST_MIN, CONST_MAX + 1)))


def _build(rng, n_vars, depth, min_height, max_height, full) -> Node:
    if depth >= max_height:
        return _terminal(rng, n_vars)
    if not full and depth >= min_height:
        n_term = n_vars + 1
        if rng.random() < n_term / (n_term + len(_OP_NAMES)):
            return _terminal(rng, n_vars)
    name = _OP_NAMES[int(rng.integers(len(_OP_NAMES)))]
    children = tuple(
        _build(rng, n_vars, depth + 1, min_height, max_height, full)
        for _ in range(OPERATORS[name])
    )
    return Op(name, children)


def grow(rng: np.random.Generator, n_vars: int, max_height: int, min_height: int = 1) -> Node:
    """Grow-method tree with height in ``[min_height, max_height]``."""
    return _build(rng, n_vars, 1, min_height, max_height, full=False)


def full(rng: np.random.Generator, n_vars: int, height: int) -> Node:
    """Full-method tree: every leaf sits at depth ``height``."""
    return _build(rng, n_vars, 1, height, height, full=True)


def random_tree(rng: np.random.Generator, domain: Domain = Domain(),
                height_range=INIT_HEIGHT) -> Node:
    """Ramped half-and-half initialisation.

    A target height is drawn uniformly from ``height_range``; the tree is
    then built with the full or grow method with equal probability.  Grow
    trees are forced to reach ``height_range[0]`` so the result always lies
    inside the range.
    """
    lo, hi = height_range
    if not 1 <= lo <= hi:
        raise ValueError(f"invalid height range {height_range!r}")
    h = int(rng.integers(lo, hi + 1))
    if rng.random() < 0.5:
        return full(rng, domain.dimension, h)
    return grow(rng, domain.dimension, h, min_height=lo)


# -- variation ----------------------------------------------------------------

def _random_path(rng: np.random.Generator, tree: Node) -> tuple:
    paths = [p for p, _ in iter_nodes(tree)]
    return paths[int(rng.integers(len(paths)))]


def subtree_crossover(rng: np.random.Generator, a: Node, b: Node,
                      max_height: int = MAX_HEIGHT) -> tuple[Node, Node]:
    """Swap uniformly chosen subtrees of ``a`` and ``b``.

    A child taller than ``max_height`` is discarded and its parent is
    returned in its place.
    """
    pa, pb = _random_path(rng, a), _random_path(rng, b)
    sa, sb = subtree_at(a, pa), subtree_at(b, pb)
    c1, c2 = replace_at(a, pa, sb), replace_at(b, pb, sa)
    if c1.height > max_height:
        c1 = a
    if c2.height > max_height:
        c2 = b
    return c1, c2


def subtree_mutation(rng: np.random.Generator, a: Node, n_vars: int = 2,
                     max_height: int = MAX_HEIGHT,
                     subtree_height: int = MUTATION_HEIGHT) -> Node:
    """Replace a uniformly chosen subtree by a fresh grow-method subtree."""
    path = _random_path(rng, a)
    child = replace_at(a, path, grow(rng, n_vars, subtree_height))
    return a if child.height > max_height else child


# -- parsing ------------------------------------------------------------------

class ParseError(ValueError):
    """Malformed s-expression; ``position`` is a character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.reason = message
        self.position = position


_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_VAR = re.compile(r"x(\d+)\Z")
_INT = re.compile(r"[+-]?\d+\Z")


def parse(text: str) -> Node:
    """Parse an s-expression into a tree.

    >>> str(parse("(add x0 (mul 3 x1))"))
    '(add x0 (mul 3 x1))'
    """
    tokens = [(m.group(), m.start()) for m in _TOKEN.finditer(text)]
    if not tokens:
        raise ParseError("unexpected end of input", len(text))
    pos = 0

    def atom(tok, at):
        m = _VAR.match(tok)
        if m:
            return Var(int(m.group(1)))
        if _INT.match(tok):
            value = int(tok)
            if not CONST_MIN <= value <= CONST_MAX:
                raise ParseError(f"constant out of range: {tok}", at)
            return Const(value)
        if tok in OPERATORS:
            raise ParseError(f"operator '{tok}' used as terminal", at)
        raise ParseError(f"unknown symbol '{tok}'", at)

    def expr():
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of input", len(text))
        tok, at = tokens[pos]
        pos += 1
        if tok == ")":
            raise ParseError("unexpected ')'", at)
        if tok != "(":
            return atom(tok, at)
        if pos >= len(tokens):
            raise ParseError("unexpected end of input", len(text))
        name, name_at = tokens[pos]
        if name not in OPERATORS:
            raise ParseError(f"unknown operator '{name}'", name_at)
        pos += 1
        children = []
        while pos < len(tokens) and tokens[pos][0] != ")":
            children.append(expr())
        if pos >= len(tokens):
            raise ParseError("missing ')'", len(text))
        pos += 1
        if len(children) != OPERATORS[name]:
            raise ParseError(
                f"'{name}' expects {OPERATORS[name]} argument(s), got {len(children)}", name_at)
        return Op(name, tuple(children))

    tree = expr()
    if pos != len(tokens):
        raise ParseError("trailing input", tokens[pos][1])
    return tree
