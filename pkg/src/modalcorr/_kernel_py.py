"""Pure-Python evaluation kernel (bit-parallel over valuation lanes).

Mirrors the compiled kernel exactly, but uses Python's unbounded integers for
the lane masks, so it also handles lane counts beyond 64.  All functions take
relation bitmasks (bit ``u*size+v`` set means the edge (u,v) is present) and
programs from :mod:`modalcorr._encode`.
"""

from __future__ import annotations

from ._encode import (
    FO_ALL,
    FO_AND,
    FO_EQ,
    FO_EX,
    FO_FALSE,
    FO_IMP,
    FO_NOT,
    FO_OR,
    FO_R,
    FO_RP,
    FO_TRUE,
    FOProgram,
    OP_AND,
    OP_BBOX,
    OP_BDIA,
    OP_BOT,
    OP_BOX,
    OP_DIA,
    OP_IMP,
    OP_NOM,
    OP_NOT,
    OP_OR,
    OP_PROP,
    OP_SBBOX,
    OP_SBDIA,
    OP_SBOX,
    OP_SDIA,
    OP_TOP,
    StmtProgram,
    prop_patterns,
)

_BOX_LIKE = {OP_BOX, OP_SBOX, OP_BBOX, OP_SBBOX}
_MODAL = _BOX_LIKE | {OP_DIA, OP_SDIA, OP_BDIA, OP_SBDIA}


def _adjacency(size: int, r_mask: int, rp_mask: int):
    r_row = [0] * size
    r_col = [0] * size
    rp_row = [0] * size
    rp_col = [0] * size
    for u in range(size):
        for v in range(size):
            bit = u * size + v
            if r_mask >> bit & 1:
                r_row[u] |= 1 << v
                r_col[v] |= 1 << u
            if rp_mask >> bit & 1:
                rp_row[u] |= 1 << v
                rp_col[v] |= 1 << u
    return r_row, r_col, rp_row, rp_col


def _eval_formula(
    prog: StmtProgram,
    fi: int,
    size: int,
    full: int,
    patterns: list[int],
    nom_world: tuple[int, ...],
    bound_vals: list[list[int]],
    rows,
) -> list[int]:
    r_row, r_col, rp_row, rp_col = rows
    stack: list[list[int]] = []
    for i in range(prog.starts[fi], prog.ends[fi]):
        op = prog.ops[i]
        arg = prog.args[i]
        if op == OP_PROP:
            if arg < prog.n_free:
                stack.append([patterns[arg * size + w] for w in range(size)])
            else:
                stack.append(list(bound_vals[arg - prog.n_free]))
        elif op == OP_NOM:
            w0 = nom_world[arg]
            stack.append([full if w == w0 else 0 for w in range(size)])
        elif op == OP_TOP:
            stack.append([full] * size)
        elif op == OP_BOT:
            stack.append([0] * size)
        elif op == OP_NOT:
            top = stack[-1]
            stack[-1] = [full & ~m for m in top]
        elif op == OP_AND:
            right = stack.pop()
            left = stack[-1]
            stack[-1] = [left[w] & right[w] for w in range(size)]
        elif op == OP_OR:
            right = stack.pop()
            left = stack[-1]
            stack[-1] = [left[w] | right[w] for w in range(size)]
        elif op == OP_IMP:
            right = stack.pop()
            left = stack[-1]
            stack[-1] = [(full & ~left[w]) | right[w] for w in range(size)]
        elif op in _MODAL:
            neighbours = {
                OP_BOX: rp_row,
                OP_DIA: rp_row,
                OP_BBOX: rp_col,
                OP_BDIA: rp_col,
                OP_SBOX: r_col,
                OP_SDIA: r_col,
                OP_SBBOX: r_row,
                OP_SBDIA: r_row,
            }[op]
            sub = stack[-1]
            out = []
            if op in _BOX_LIKE:
                for w in range(size):
                    acc = full
                    row = neighbours[w]
                    for v in range(size):
                        if row >> v & 1:
                            acc &= sub[v]
                    out.append(acc)
            else:
                for w in range(size):
                    acc = 0
                    row = neighbours[w]
                    for v in range(size):
                        if row >> v & 1:
                            acc |= sub[v]
                    out.append(acc)
            stack[-1] = out
        else:
            raise AssertionError(f"bad opcode {op}")
    return stack[-1]


def _leq_mask(lhs: list[int], rhs: list[int], full: int) -> int:
    acc = full
    for w in range(len(lhs)):
        acc &= (full & ~lhs[w]) | rhs[w]
    return acc


def valid_stmt(size: int, r_mask: int, rp_mask: int, prog: StmtProgram) -> bool:
    """Statement validity on one frame (all valuations, all nominal assignments)."""
    n_lanes = 1 << (size * prog.n_free)
    full = (1 << n_lanes) - 1
    patterns = prop_patterns(size, prog.n_free, n_lanes)
    rows = _adjacency(size, r_mask, rp_mask)
    n_nom_assignments = size**prog.n_noms

    for idx in range(n_nom_assignments):
        t = idx
        nom_world = []
        for _ in range(prog.n_noms):
            nom_world.append(t % size)
            t //= size
        nom_world = tuple(nom_world)

        ante = full
        for lhs_fi, rhs_fi, group in prog.ineqs:
            if group == 0:
                lhs = _eval_formula(
                    prog, lhs_fi, size, full, patterns, nom_world, [], rows
                )
                rhs = _eval_formula(
                    prog, rhs_fi, size, full, patterns, nom_world, [], rows
                )
                ante &= _leq_mask(lhs, rhs, full)

        if prog.n_bound == 0:
            cons = full
            for lhs_fi, rhs_fi, group in prog.ineqs:
                if group == 1:
                    lhs = _eval_formula(
                        prog, lhs_fi, size, full, patterns, nom_world, [], rows
                    )
                    rhs = _eval_formula(
                        prog, rhs_fi, size, full, patterns, nom_world, [], rows
                    )
                    cons &= _leq_mask(lhs, rhs, full)
            if ante & ~cons & full:
                return False
        else:
            found = 0
            for combo in range(1 << (size * prog.n_bound)):
                bound_vals = [
                    [
                        full if combo >> (t * size + w) & 1 else 0
                        for w in range(size)
                    ]
                    for t in range(prog.n_bound)
                ]
                cons = full
                for lhs_fi, rhs_fi, group in prog.ineqs:
                    if group == 1:
                        lhs = _eval_formula(
                            prog, lhs_fi, size, full, patterns, nom_world, bound_vals, rows
                        )
                        rhs = _eval_formula(
                            prog, rhs_fi, size, full, patterns, nom_world, bound_vals, rows
                        )
                        cons &= _leq_mask(lhs, rhs, full)
                found |= cons
                if found == full:
                    break
            if ante & ~found & full:
                return False
    return True


def eval_fo_frame(size: int, r_mask: int, rp_mask: int, fo: FOProgram) -> bool:
    """Truth of a closed predicate-free sentence on one frame."""
    env = [0] * fo.n_slots
    kinds, av, bv = fo.kinds, fo.a, fo.b

    def ev(i: int) -> bool:
        k = kinds[i]
        if k == FO_R:
            return bool(r_mask >> (env[av[i]] * size + env[bv[i]]) & 1)
        if k == FO_RP:
            return bool(rp_mask >> (env[av[i]] * size + env[bv[i]]) & 1)
        if k == FO_EQ:
            return env[av[i]] == env[bv[i]]
        if k == FO_TRUE:
            return True
        if k == FO_FALSE:
            return False
        if k == FO_NOT:
            return not ev(av[i])
        if k == FO_AND:
            return ev(av[i]) and ev(bv[i])
        if k == FO_OR:
            return ev(av[i]) or ev(bv[i])
        if k == FO_IMP:
            return (not ev(av[i])) or ev(bv[i])
        slot = av[i]
        old = env[slot]
        if k == FO_ALL:
            for w in range(size):
                env[slot] = w
                if not ev(bv[i]):
                    env[slot] = old
                    return False
            env[slot] = old
            return True
        if k == FO_EX:
            for w in range(size):
                env[slot] = w
                if ev(bv[i]):
                    env[slot] = old
                    return True
            env[slot] = old
            return False
        raise AssertionError(f"bad FO kind {k}")

    return ev(len(kinds) - 1)


def scan_stmt_vs_fo(size: int, prog: StmtProgram, fo: FOProgram):
    """First frame of ``size`` where statement validity and FO truth disagree."""
    total = 1 << (size * size)
    for r_mask in range(total):
        for rp_mask in range(total):
            sv = valid_stmt(size, r_mask, rp_mask, prog)
            fv = eval_fo_frame(size, r_mask, rp_mask, fo)
            if sv != fv:
                return r_mask, rp_mask, sv, fv
    return None


def scan_stmt_vs_stmt(size: int, prog_a: StmtProgram, prog_b: StmtProgram):
    """First frame of ``size`` where the two statements' validity disagrees."""
    total = 1 << (size * size)
    for r_mask in range(total):
        for rp_mask in range(total):
            va = valid_stmt(size, r_mask, rp_mask, prog_a)
            vb = valid_stmt(size, r_mask, rp_mask, prog_b)
            if va != vb:
                return r_mask, rp_mask, va, vb
    return None
