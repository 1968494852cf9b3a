"""Pretty-printer producing text that parses back to the same AST."""

from __future__ import annotations

from . import ast as A

_PREC = {"+": 1, "-": 1, "*": 2}


def _prec(e: A.Expr) -> int:
    if isinstance(e, A.BinOp):
        return _PREC[e.op]
    if isinstance(e, A.Neg) or (isinstance(e, A.Num) and e.value < 0):
        return 3
    return 4


def expr(e: A.Expr) -> str:
    if isinstance(e, A.Num):
        return str(e.value)
    if isinstance(e, A.Rand):
        return f"[{e.lo},{e.hi}]"
    if isinstance(e, A.Var):
        return e.name
    if isinstance(e, A.Neg):
        inner = expr(e.operand)
        if _prec(e.operand) < 3 or inner.startswith("-"):
            inner = f"({inner})"
        return f"-{inner}"
    p = _PREC[e.op]
    left, right = expr(e.left), expr(e.right)
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


def _is_bare(b: A.BExpr) -> bool:
    return isinstance(b, A.Cmp) and b.op == "!=" and b.right == A.Num(0) and isinstance(b.left, A.Var)


def bexpr(b: A.BExpr, bare_vars: bool = False) -> str:
    """Render a condition; with ``bare_vars``, ``B != 0`` is written ``B``."""
    if isinstance(b, A.BoolConst):
        return "true" if b.value else "false"
    if isinstance(b, A.Cmp):
        if bare_vars and _is_bare(b):
            return b.left.name
        return f"{expr(b.left)} {b.op} {expr(b.right)}"
    if isinstance(b, A.Not):
        inner = bexpr(b.operand, bare_vars)
        if not (isinstance(b.operand, A.Not) or (bare_vars and _is_bare(b.operand))):
            inner = f"({inner})"
        return f"!{inner}"
    op = "&&" if isinstance(b, A.And) else "||"
    parts = []
    for side in (b.left, b.right):
        text = bexpr(side, bare_vars)
        weaker = isinstance(side, A.Or) and isinstance(b, A.And)
        if weaker or (side is b.right and type(side) is type(b)):
            text = f"({text})"
        parts.append(text)
    return f"{parts[0]} {op} {parts[1]}"


def stmt_head(stmt: A.Stmt) -> str:
    """One-line summary of a statement, used in reports."""
    if isinstance(stmt, A.Skip):
        return "skip;"
    if isinstance(stmt, A.Assign):
        return f"{stmt.var} := {expr(stmt.expr)};"
    if isinstance(stmt, A.Decl):
        return _decl(stmt)
    if isinstance(stmt, A.If):
        return f"if ({bexpr(stmt.cond)})"
    if isinstance(stmt, A.While):
        return f"while ({bexpr(stmt.cond)})"
    if isinstance(stmt, A.IfDef):
        return f"#if ({bexpr(stmt.cond, True)})"
    if isinstance(stmt, A.Assert):
        return f"assert ({bexpr(stmt.cond)});"
    return "{ ... }"


def _decl(d: A.Decl) -> str:
    items = [name if init is None else f"{name} := {expr(init)}" for name, init in d.items]
    return f"int {', '.join(items)};"


def _lines(stmt: A.Stmt, depth: int, show_labels: bool) -> list[str]:
    pad = "  " * depth
    tag = f"/* {stmt.label} */ " if show_labels and stmt.label is not None else ""
    if isinstance(stmt, A.Block):
        return [pad + tag + "{"] + _block_body(stmt, depth + 1, show_labels) + [pad + "}"]
    if isinstance(stmt, A.If):
        out = [f"{pad}{tag}if ({bexpr(stmt.cond)}) {{"]
        out += _block_body(stmt.then, depth + 1, show_labels)
        if stmt.orelse.stmts:
            out += [pad + "} else {"] + _block_body(stmt.orelse, depth + 1, show_labels)
        return out + [pad + "}"]
    if isinstance(stmt, A.While):
        out = [f"{pad}{tag}while ({bexpr(stmt.cond)}) {{"]
        out += _block_body(stmt.body, depth + 1, show_labels)
        if show_labels and stmt.end_label is not None:
            out.append(f"{pad}  /* {stmt.end_label} */")
        return out + [pad + "}"]
    if isinstance(stmt, A.IfDef):
        out = [f"{pad}{tag}#if ({bexpr(stmt.cond, True)})"]
        out += _block_body(stmt.then, depth + 1, show_labels)
        if stmt.orelse.stmts:
            out += [pad + "#else"] + _block_body(stmt.orelse, depth + 1, show_labels)
        return out + [pad + "#endif"]
    return [pad + tag + stmt_head(stmt)]


def _block_body(block: A.Block, depth: int, show_labels: bool) -> list[str]:
    out: list[str] = []
    for s in block.stmts:
        out += _lines(s, depth, show_labels)
    return out


def pretty(program: A.Program, show_labels: bool = False) -> str:
    out = []
    for f in program.features:
        out.append(f"#feature {f.name} bool" if f.boolean else f"#feature {f.name} in [{f.lo},{f.hi}]")
    for c in program.constraints:
        out.append(f"#constraint {bexpr(c, True)}")
    body = program.body
    if len(body.stmts) == 1 and isinstance(body.stmts[0], A.Block):
        # a lone nested block would otherwise be read back as the body itself
        out += _lines(A.Block((body,)), 0, show_labels)[1:-1]
    else:
        out += _block_body(body, 0, show_labels)
    if show_labels and program.exit_label is not None:
        out.append(f"/* {program.exit_label} */")
    return "\n".join(out) + "\n"
