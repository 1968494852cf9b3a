"""Tuple lifted domain: one numerical element per valid configuration."""

from __future__ import annotations

from typing import Callable, Sequence

from .errors import ShapeMismatch
from .featspace import Configuration, FeatureSpace, describe, sat
from .frontend import ast as A
from .numdom import NumElement


class TupleDomain:
    """The fixed context of a tuple analysis: configurations and leaf domain."""

    def __init__(self, space: FeatureSpace, configs: Sequence[Configuration],
                 leaf_cls: type[NumElement], universe: Sequence[str]):
        self.space = space
        self.configs = tuple(configs)
        self.leaf_cls = leaf_cls
        self.universe = tuple(universe)
        self._sat_cache: dict[A.BExpr, tuple[bool, ...]] = {}

    def top(self) -> "TupleState":
        t = self.leaf_cls.top(self.universe)
        return TupleState(self, [t] * len(self.configs))

    def bottom(self) -> "TupleState":
        b = self.leaf_cls.bottom(self.universe)
        return TupleState(self, [b] * len(self.configs))

    def mask(self, theta: A.BExpr) -> tuple[bool, ...]:
        hit = self._sat_cache.get(theta)
        if hit is None:
            hit = tuple(sat(k, theta) for k in self.configs)
            self._sat_cache[theta] = hit
        return hit


class TupleState:
    __slots__ = ("domain", "elems")

    def __init__(self, domain: TupleDomain, elems: list[NumElement]):
        self.domain = domain
        self.elems = list(elems)

    @property
    def order(self) -> tuple[Configuration, ...]:
        return self.domain.configs

    def __len__(self) -> int:
        return len(self.elems)

    def __eq__(self, other) -> bool:
        return isinstance(other, TupleState) and self.order == other.order and self.elems == other.elems

    def __repr__(self) -> str:
        return f"TupleState({len(self.elems)} components)"

    def component(self, k: Configuration) -> NumElement:
        return self.elems[self.order.index(k)]

    def mapping(self) -> dict[Configuration, NumElement]:
        return dict(zip(self.order, self.elems))

    @property
    def is_bottom(self) -> bool:
        return all(e.is_bottom for e in self.elems)

    def _check(self, other: "TupleState") -> None:
        if self.domain is not other.domain and (len(self) != len(other) or self.order != other.order):
            raise ShapeMismatch(f"tuples over {len(self)} and {len(other)} configurations")

    # -- lattice ------------------------------------------------------------------

    def leq(self, other: "TupleState") -> bool:
        self._check(other)
        return all(a.leq(b) for a, b in zip(self.elems, other.elems))

    def _zip(self, other: "TupleState", op: str) -> "TupleState":
        self._check(other)
        return TupleState(self.domain, [getattr(a, op)(b) for a, b in zip(self.elems, other.elems)])

    def join(self, other):
        return self._zip(other, "join")

    def meet(self, other):
        return self._zip(other, "meet")

    def widen(self, other):
        return self._zip(other, "widen")

    def narrow(self, other):
        return self._zip(other, "narrow")

    # -- transfer functions -------------------------------------------------------

    def assign(self, var: str, expr: A.Expr) -> "TupleState":
        return TupleState(self.domain, [e.assign(var, expr) for e in self.elems])

    def filter(self, cond: A.BExpr) -> "TupleState":
        return TupleState(self.domain, [e.filter(cond) for e in self.elems])

    def feat_filter(self, theta: A.BExpr) -> "TupleState":
        bot = self.domain.leaf_cls.bottom(self.domain.universe)
        return TupleState(self.domain, [e if m else bot for e, m in zip(self.elems, self.domain.mask(theta))])

    def ifdef(self, theta: A.BExpr, run_then: Callable[["TupleState"], "TupleState"],
              run_else: Callable[["TupleState"], "TupleState"]) -> "TupleState":
        return run_then(self.feat_filter(theta)).join(run_else(self.feat_filter(A.Not(theta))))

    # -- reporting ------------------------------------------------------------------

    def partitions(self) -> list[tuple[str, NumElement]]:
        return [(describe(k, self.domain.space), e) for k, e in zip(self.order, self.elems)]

    def to_json(self) -> list[dict]:
        return [{"config": cond, "state": _state_json(e)} for cond, e in self.partitions()]


def _state_json(e: NumElement):
    r = e.render()
    return r if isinstance(r, str) else list(r)
