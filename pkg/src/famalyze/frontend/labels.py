"""Location labelling.

A label names the program point just before a statement.  Labels are
handed out in textual pre-order:

* every statement of an ordinary block gets one;
* inside `#if` arms only compound statements and asserts get one, since a
  plain assignment there is part of the directive's own location;
* each loop body gets a closing label for the state after the body, and
  the program gets an exit label, unless the block already ends in an
  assert (whose label is then the final point).
"""

from __future__ import annotations

import itertools
from dataclasses import replace

from . import ast as A

_SIMPLE = (A.Skip, A.Assign, A.Decl)


def _ends_with_assert(block: A.Block) -> bool:
    return bool(block.stmts) and isinstance(block.stmts[-1], A.Assert)


def _label_block(block: A.Block, counter, in_arm: bool) -> A.Block:
    out = []
    for stmt in block.stmts:
        lab = None if in_arm and isinstance(stmt, _SIMPLE) else next(counter)
        out.append(_label_stmt(stmt, lab, counter))
    return A.Block(tuple(out), block.label)


def _label_stmt(stmt: A.Stmt, lab: int | None, counter) -> A.Stmt:
    if isinstance(stmt, A.Block):
        return replace(_label_block(stmt, counter, False), label=lab)
    if isinstance(stmt, A.If):
        then = _label_block(stmt.then, counter, False)
        orelse = _label_block(stmt.orelse, counter, False)
        return A.If(stmt.cond, then, orelse, lab)
    if isinstance(stmt, A.While):
        body = _label_block(stmt.body, counter, False)
        end = None if _ends_with_assert(body) else next(counter)
        return A.While(stmt.cond, body, lab, end)
    if isinstance(stmt, A.IfDef):
        then = _label_block(stmt.then, counter, True)
        orelse = _label_block(stmt.orelse, counter, True)
        return A.IfDef(stmt.cond, then, orelse, lab)
    return replace(stmt, label=lab)


def label(program: A.Program) -> A.Program:
    """Return a copy of ``program`` with fresh labels 1, 2, ... (idempotent)."""
    counter = itertools.count(1)
    body = _label_block(program.body, counter, False)
    exit_label = None if _ends_with_assert(body) else next(counter)
    return A.Program(program.features, program.constraints, body, program.variables,
                     exit_label, name=program.name)


def locations(program: A.Program) -> list[A.Location]:
    """All labelled points of a program in label order."""
    from .pretty import stmt_head

    found: list[A.Location] = []

    def visit(stmt: A.Stmt) -> None:
        if stmt.label is not None:
            found.append(A.Location(stmt.label, "stmt", stmt_head(stmt)))
        if isinstance(stmt, A.Block):
            for s in stmt.stmts:
                visit(s)
        elif isinstance(stmt, (A.If, A.IfDef)):
            visit(stmt.then)
            visit(stmt.orelse)
        elif isinstance(stmt, A.While):
            visit(stmt.body)
            if stmt.end_label is not None:
                found.append(A.Location(stmt.end_label, "loop-end", "end of loop body"))

    visit(program.body)
    if program.exit_label is not None:
        found.append(A.Location(program.exit_label, "exit", "program exit"))
    return sorted(found, key=lambda loc: loc.label)
