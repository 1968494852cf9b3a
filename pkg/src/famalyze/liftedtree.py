"""Decision-tree lifted domain.

Internal nodes test linear constraints over the features; leaves hold
numerical elements over the program variables.  A node's left child is
its true branch.  Of a constraint and its integer complement only the
larger one (lexicographically on coefficients, then constant) is stored,
and every node constraint is smaller than all constraints below it.
"""

from __future__ import annotations

from typing import Callable, Iterator, Sequence

from .featspace import Configuration, FeatureSpace
from .frontend import ast as A
from .numdom import Box, NumElement
from .numdom.linear import LinConstraint, render_form

# -- feature constraints -------------------------------------------------------------


def negate(c: LinConstraint) -> LinConstraint:
    return c.negate()


def canonical(c: LinConstraint) -> tuple[LinConstraint, bool]:
    """The stored representative of ``c`` and whether it is ``c`` itself."""
    c = LinConstraint.tight(c.coeffs, c.const)
    n = c.negate()
    return (c, True) if c > n else (n, False)


def cmp_constraint(c1: LinConstraint, c2: LinConstraint) -> int:
    return (c1 > c2) - (c1 < c2)


def literal(c: LinConstraint, positive: bool) -> LinConstraint:
    return c if positive else c.negate()


def render_constraint(c: LinConstraint, names: Sequence[str], boolean: frozenset = frozenset()) -> str:
    """Readable form: ``SIZE>=4``, ``!B``, ``A+B<=3``."""
    coeffs = c.coeffs
    support = c.support()
    if len(support) == 1:
        i = support[0]
        a, name = coeffs[i], names[i]
        if name in boolean and (a, c.const) in ((1, -1), (-1, 0)):
            return name if a == 1 else f"!{name}"
        if a == 1:
            return f"{name}>={-c.const}"
        if a == -1:
            return f"{name}<={c.const}"
    lead = coeffs[support[0]] if support else 1
    if lead < 0:
        return render_form(tuple(-x for x in coeffs), 0, names) + f"<={c.const}"
    return render_form(coeffs, 0, names) + f">={-c.const}"


# -- trees --------------------------------------------------------------------------------


class Leaf:
    __slots__ = ("elem", "_hash")

    def __init__(self, elem: NumElement):
        self.elem = elem
        self._hash = None

    is_leaf = True

    def __eq__(self, other):
        return self is other or (isinstance(other, Leaf) and self.elem == other.elem)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("leaf", self.elem))
        return self._hash

    def __repr__(self):
        return f"<{self.elem!r}>"


class Node:
    __slots__ = ("c", "left", "right", "_hash")

    def __init__(self, c: LinConstraint, left: "Tree", right: "Tree"):
        self.c, self.left, self.right = c, left, right
        self._hash = None

    is_leaf = False

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Node) and hash(self) == hash(other) and self.c == other.c \
            and self.left == other.left and self.right == other.right

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.c, self.left, self.right))
        return self._hash

    def __repr__(self):
        return f"[{self.c}: {self.left!r}, {self.right!r}]"


Tree = Leaf | Node


def node(c: LinConstraint, positive: bool, yes: Tree, no: Tree) -> Node:
    """Node testing ``c`` (given in any orientation) with ``yes`` on its true side."""
    canon, same = canonical(literal(c, positive))
    return Node(canon, yes, no) if same else Node(canon, no, yes)


def leaves(t: Tree) -> Iterator[Leaf]:
    if t.is_leaf:
        yield t
    else:
        yield from leaves(t.left)
        yield from leaves(t.right)


def leaf_count(t: Tree) -> int:
    return sum(1 for _ in leaves(t))


def constraints_of(t: Tree) -> Iterator[LinConstraint]:
    if not t.is_leaf:
        yield t.c
        yield from constraints_of(t.left)
        yield from constraints_of(t.right)


# -- path contexts ------------------------------------------------------------------------


class PathContext:
    """Conjunction of the constraints met on a path, abstracted in the node domain.

    Contexts are memoized per literal so that repeated walks over similar
    trees reuse the same entailment checks.
    """

    __slots__ = ("elem", "path", "_children", "_entails")

    def __init__(self, elem: NumElement, path: tuple[LinConstraint, ...] = ()):
        self.elem = elem
        self.path = path
        self._children: dict[LinConstraint, PathContext] = {}
        self._entails: dict[LinConstraint, bool] = {}

    def add(self, c: LinConstraint) -> "PathContext":
        child = self._children.get(c)
        if child is None:
            child = PathContext(self.elem.add_constraints([c]), self.path + (c,))
            self._children[c] = child
        return child

    def entails(self, c: LinConstraint) -> bool:
        hit = self._entails.get(c)
        if hit is None:
            hit = self.elem.entails(c)
            self._entails[c] = hit
        return hit

    @property
    def is_bottom(self) -> bool:
        return self.elem.is_bottom


def is_redundant(c: LinConstraint, ctx: PathContext) -> bool:
    return ctx.entails(c)


# -- algorithms ----------------------------------------------------------------------------


def merge(t1: Tree, t2: Tree, ctx: PathContext,
          at_leaves: Callable[[Leaf, Leaf, PathContext], Tree]) -> Tree:
    """Walk two trees over a common refinement, combining paired leaves."""
    if t1.is_leaf and t2.is_leaf:
        return at_leaves(t1, t2, ctx)
    if t1.is_leaf or (not t2.is_leaf and t2.c < t1.c):
        c = t2.c
        if ctx.entails(c):
            return merge(t1, t2.left, ctx, at_leaves)
        if ctx.entails(c.negate()):
            return merge(t1, t2.right, ctx, at_leaves)
        return Node(c, merge(t1, t2.left, ctx.add(c), at_leaves),
                    merge(t1, t2.right, ctx.add(c.negate()), at_leaves))
    if t2.is_leaf or t1.c < t2.c:
        c = t1.c
        if ctx.entails(c):
            return merge(t1.left, t2, ctx, at_leaves)
        if ctx.entails(c.negate()):
            return merge(t1.right, t2, ctx, at_leaves)
        return Node(c, merge(t1.left, t2, ctx.add(c), at_leaves),
                    merge(t1.right, t2, ctx.add(c.negate()), at_leaves))
    c = t1.c
    if ctx.entails(c):
        return merge(t1.left, t2.left, ctx, at_leaves)
    if ctx.entails(c.negate()):
        return merge(t1.right, t2.right, ctx, at_leaves)
    return Node(c, merge(t1.left, t2.left, ctx.add(c), at_leaves),
                merge(t1.right, t2.right, ctx.add(c.negate()), at_leaves))


def unify(t1: Tree, t2: Tree, ctx: PathContext) -> tuple[Tree, Tree]:
    """Both trees restructured over a common decision skeleton."""
    return (merge(t1, t2, ctx, lambda a, b, _: a), merge(t1, t2, ctx, lambda a, b, _: b))


def restrict(t: Tree, ctx: PathContext, J: Sequence[tuple[LinConstraint, bool]], bottom: Leaf) -> Tree:
    """Insert the literals of ``J`` (sorted canonical constraint, polarity).

    Paths that contradict a literal end in ``bottom``.
    """
    if not J:
        if t.is_leaf:
            return t
        if ctx.entails(t.c):
            return restrict(t.left, ctx, J, bottom)
        if ctx.entails(t.c.negate()):
            return restrict(t.right, ctx, J, bottom)
        return Node(t.c, restrict(t.left, ctx.add(t.c), J, bottom),
                    restrict(t.right, ctx.add(t.c.negate()), J, bottom))
    j, positive = J[0]
    if t.is_leaf or j <= t.c:
        lit = literal(j, positive)
        if ctx.entails(lit):
            return restrict(t, ctx, J[1:], bottom)
        if ctx.entails(lit.negate()):
            return bottom
        if not t.is_leaf and j == t.c:
            t = t.left if positive else t.right
        inner = restrict(t, ctx.add(lit), J[1:], bottom)
        return Node(j, inner, bottom) if positive else Node(j, bottom, inner)
    if ctx.entails(t.c):
        return restrict(t.left, ctx, J, bottom)
    if ctx.entails(t.c.negate()):
        return restrict(t.right, ctx, J, bottom)
    return Node(t.c, restrict(t.left, ctx.add(t.c), J, bottom),
                restrict(t.right, ctx.add(t.c.negate()), J, bottom))


def compress(t: Tree, ctx: PathContext) -> Tree:
    """Shrink ``t`` without changing what it means for any configuration in ``ctx``."""
    if t.is_leaf:
        return t
    c = t.c
    # a node whose test is decided by the path is dropped, leaves or not
    if ctx.entails(c):
        return compress(t.left, ctx)
    if ctx.entails(c.negate()):
        return compress(t.right, ctx)
    yes, no = ctx.add(c), ctx.add(c.negate())
    l, r = compress(t.left, yes), compress(t.right, no)
    if l == r:
        return l
    # a left leaf already reached by the true side of the right subtree
    if l.is_leaf and not r.is_leaf and r.left == l and yes.entails(r.c):
        return r
    # a right leaf already reached by the false side of the left subtree
    if r.is_leaf and not l.is_leaf and l.right == r and no.entails(l.c.negate()):
        return l
    return Node(c, l, r)


# -- the lifted domain ------------------------------------------------------------------------


class TreeDomain:
    """Shared context of a tree analysis: features, node domain and leaf domain."""

    def __init__(self, space: FeatureSpace, leaf_cls: type[NumElement], universe: Sequence[str],
                 node_cls: type[NumElement] = Box):
        self.space = space
        self.features = space.names
        self.boolean = frozenset(f.name for f in space.features if (f.lo, f.hi) == (0, 1))
        self.leaf_cls = leaf_cls
        self.node_cls = node_cls
        self.universe = tuple(universe)
        self.root = PathContext(node_cls.from_box(self.features, space.bounds))
        self.bottom_leaf = Leaf(leaf_cls.bottom(self.universe))
        self.top_leaf = Leaf(leaf_cls.top(self.universe))
        self._atom_cache: dict[A.Cmp, list[tuple[LinConstraint, bool]] | None] = {}

    def top(self) -> "TreeState":
        return TreeState(self, self.top_leaf)

    def bottom(self) -> "TreeState":
        return TreeState(self, self.bottom_leaf)

    def initial(self) -> "TreeState":
        """``top`` restricted to the declared feature constraints."""
        s = self.top()
        for k in self.space.constraints:
            s = s.feat_filter(k)
        return s

    def leaf(self, elem: NumElement) -> Leaf:
        return Leaf(elem)

    def state(self, tree: Tree) -> "TreeState":
        return TreeState(self, tree)

    def compress(self, t: Tree) -> Tree:
        return compress(t, self.root)

    # -- feature tests ----------------------------------------------------------------

    def atom_literals(self, atom: A.Cmp) -> list[tuple[LinConstraint, bool]] | None:
        """Node-domain approximation of a feature comparison; None when unsatisfiable."""
        if atom in self._atom_cache:
            return self._atom_cache[atom]
        filtered = self.root.elem.filter(atom)
        if filtered.is_bottom:
            out = None
        else:
            cs = [c for c in filtered.to_constraints() if not self.root.entails(c)]
            # drop literals implied by the others together with the feature ranges
            kept = list(cs)
            for c in cs:
                rest = [d for d in kept if d != c]
                if self.root.elem.add_constraints(rest).entails(c):
                    kept = rest
            out = sorted(canonical(c) for c in kept)
        self._atom_cache[atom] = out
        return out

    def feat_filter(self, t: Tree, theta: A.BExpr) -> Tree:
        return self.compress(self._feat_filter(t, _split_ne(A.nnf(theta))))

    def _feat_filter(self, t: Tree, theta: A.BExpr) -> Tree:
        if isinstance(theta, A.BoolConst):
            return t if theta.value else self.bottom_leaf
        if isinstance(theta, A.And):
            return self.meet(self._feat_filter(t, theta.left), self._feat_filter(t, theta.right))
        if isinstance(theta, A.Or):
            return self.join(self._feat_filter(t, theta.left), self._feat_filter(t, theta.right))
        J = self.atom_literals(theta)
        if J is None:
            return self.bottom_leaf
        return restrict(t, self.root, J, self.bottom_leaf)

    # -- lattice on raw trees ------------------------------------------------------------

    def leafwise(self, op: str, t1: Tree, t2: Tree, compressed: bool = True) -> Tree:
        """``op`` on paired leaves of the unified trees; ``compressed=False`` keeps the common skeleton."""
        def combine(a: Leaf, b: Leaf, ctx: PathContext) -> Leaf:
            if ctx.is_bottom:
                return a
            if op == "join" and a.elem.is_bottom:
                return b
            r = getattr(a.elem, op)(b.elem)
            return a if r == a.elem else (b if r == b.elem else Leaf(r))

        out = merge(t1, t2, self.root, combine)
        return self.compress(out) if compressed else out

    def join(self, t1, t2):
        return self.leafwise("join", t1, t2)

    def meet(self, t1, t2):
        return self.leafwise("meet", t1, t2)

    def widen(self, t1, t2):
        return self.leafwise("widen", t1, t2)

    def narrow(self, t1, t2):
        return self.leafwise("narrow", t1, t2)

    def leq(self, t1: Tree, t2: Tree) -> bool:
        ok = True

        def check(a: Leaf, b: Leaf, ctx: PathContext) -> Leaf:
            nonlocal ok
            if ok and not ctx.is_bottom and not a.elem.leq(b.elem):
                ok = False
            return a

        merge(t1, t2, self.root, check)
        return ok

    def map_leaves(self, t: Tree, f: Callable[[NumElement], NumElement]) -> Tree:
        memo: dict[Leaf, Leaf] = {}

        def walk(u: Tree) -> Tree:
            if u.is_leaf:
                out = memo.get(u)
                if out is None:
                    r = f(u.elem)
                    out = u if r == u.elem else Leaf(r)
                    memo[u] = out
                return out
            return Node(u.c, walk(u.left), walk(u.right))

        return self.compress(walk(t))

    # -- reading trees -----------------------------------------------------------------

    def partitions(self, t: Tree) -> list[tuple[str, NumElement]]:
        """(path condition, leaf) for every leaf on a satisfiable path."""
        out: list[tuple[str, NumElement]] = []

        def walk(u: Tree, ctx: PathContext, path: list[str]) -> None:
            if ctx.is_bottom:
                return
            if u.is_leaf:
                out.append((" && ".join(path) or "true", u.elem))
                return
            walk(u.left, ctx.add(u.c), path + [render_constraint(u.c, self.features, self.boolean)])
            walk(u.right, ctx.add(u.c.negate()), path + [render_constraint(u.c.negate(), self.features, self.boolean)])

        walk(t, self.root, [])
        return out

    def to_json(self, t: Tree):
        if t.is_leaf:
            r = t.elem.render()
            return {"leaf": r if isinstance(r, str) else list(r)}
        return {"node": render_constraint(t.c, self.features, self.boolean),
                "true": self.to_json(t.left), "false": self.to_json(t.right)}

    def render(self, t: Tree, indent: int = 0) -> str:
        pad = "  " * indent
        if t.is_leaf:
            r = t.elem.render()
            return pad + "<" + (r if isinstance(r, str) else " && ".join(r)) + ">"
        return "\n".join([pad + "[" + render_constraint(t.c, self.features, self.boolean) + "]",
                          self.render(t.left, indent + 1), self.render(t.right, indent + 1)])


def _split_ne(b: A.BExpr) -> A.BExpr:
    """Rewrite ``a != b`` into ``a < b || a > b`` so both sides stay exact."""
    if isinstance(b, A.Cmp) and b.op == "!=":
        return A.Or(A.Cmp("<", b.left, b.right), A.Cmp(">", b.left, b.right))
    if isinstance(b, (A.And, A.Or)):
        return type(b)(_split_ne(b.left), _split_ne(b.right))
    return b


def locate(t: Tree, k: Configuration) -> Leaf:
    point = k.values
    while not t.is_leaf:
        t = t.left if t.c.holds(point) else t.right
    return t


def gamma_t(t: Tree, space: FeatureSpace, cap: int | None = None) -> dict[Configuration, NumElement]:
    """The element each valid configuration receives."""
    configs = space.enumerate() if cap is None else space.enumerate(cap)
    return {k: locate(t, k).elem for k in configs}


def audit(t: Tree, ctx: PathContext | None = None) -> list[str]:
    """Structural problems of a tree: ordering, orientation, redundancy."""
    problems: list[str] = []

    def walk(u: Tree, c: PathContext | None, seen: tuple[LinConstraint, ...]) -> None:
        if u.is_leaf:
            return
        if canonical(u.c) != (u.c, True):
            problems.append(f"{u.c} is not in canonical orientation")
        for d in constraints_of(u.left):
            if not u.c < d:
                problems.append(f"{u.c} is not below {d}")
        for d in constraints_of(u.right):
            if not u.c < d:
                problems.append(f"{u.c} is not below {d}")
        if u.c in seen:
            problems.append(f"{u.c} repeated on a path")
        if c is not None:
            if c.entails(u.c) or c.entails(u.c.negate()):
                problems.append(f"{u.c} is redundant on its path")
            walk(u.left, c.add(u.c), seen + (u.c,))
            walk(u.right, c.add(u.c.negate()), seen + (u.c,))
        else:
            walk(u.left, None, seen + (u.c,))
            walk(u.right, None, seen + (u.c,))

    walk(t, ctx, ())
    return problems


class TreeState:
    """A tree together with its domain, with the operations the engine uses."""

    __slots__ = ("domain", "tree")

    def __init__(self, domain: TreeDomain, tree: Tree):
        self.domain = domain
        self.tree = tree

    def __eq__(self, other):
        return isinstance(other, TreeState) and self.tree == other.tree

    def __repr__(self):
        return f"TreeState({self.tree!r})"

    @property
    def is_bottom(self) -> bool:
        return all(l.elem.is_bottom for l in leaves(self.tree))

    def _wrap(self, t: Tree) -> "TreeState":
        return TreeState(self.domain, t)

    def leq(self, other: "TreeState") -> bool:
        return self.domain.leq(self.tree, other.tree)

    def join(self, other):
        return self._wrap(self.domain.join(self.tree, other.tree))

    def meet(self, other):
        return self._wrap(self.domain.meet(self.tree, other.tree))

    def widen(self, other):
        return self._wrap(self.domain.widen(self.tree, other.tree))

    def narrow(self, other):
        return self._wrap(self.domain.narrow(self.tree, other.tree))

    def assign(self, var: str, expr: A.Expr) -> "TreeState":
        return self._wrap(self.domain.map_leaves(self.tree, lambda e: e.assign(var, expr)))

    def filter(self, cond: A.BExpr) -> "TreeState":
        return self._wrap(self.domain.map_leaves(self.tree, lambda e: e.filter(cond)))

    def feat_filter(self, theta: A.BExpr) -> "TreeState":
        return self._wrap(self.domain.feat_filter(self.tree, theta))

    def ifdef(self, theta: A.BExpr, run_then: Callable[["TreeState"], "TreeState"],
              run_else: Callable[["TreeState"], "TreeState"]) -> "TreeState":
        return run_then(self.feat_filter(theta)).join(run_else(self.feat_filter(A.Not(theta))))

    def partitions(self) -> list[tuple[str, NumElement]]:
        return self.domain.partitions(self.tree)

    def mapping(self) -> dict[Configuration, NumElement]:
        return gamma_t(self.tree, self.domain.space)

    def leaf_count(self) -> int:
        return leaf_count(self.tree)

    def to_json(self):
        return self.domain.to_json(self.tree)
