"""Kernel dispatch: compiled extension when available, pure Python otherwise.

Both backends implement the same bit-parallel frame scans; the compiled one
is restricted to frames of at most 3 worlds and 64 valuation lanes, which
covers the default oracle budget.  Everything outside those limits (larger
frames, more variables, predicate-bearing FO formulas) silently uses the
pure backend or the reference oracle.
"""

from __future__ import annotations

from array import array

from . import _kernel_py
from ._encode import (
    EncodingUnsupported,
    FOProgram,
    StmtProgram,
    encode_fo,
    encode_statement,
    prop_patterns,
)

try:
    from . import _kernel as _compiled
except ImportError:  # pragma: no cover - depends on build environment
    _compiled = None


def backend_name() -> str:
    """Name of the scan backend selected at import time."""
    return "compiled" if _compiled is not None else "pure"


def has_compiled() -> bool:
    return _compiled is not None


_MAX_COMPILED_WORLDS = 3
_MAX_COMPILED_LANE_BITS = 6
_MAX_COMPILED_STACK = 64
_MAX_COMPILED_BOUND = 4
_MAX_COMPILED_NOMS = 8
_MAX_COMPILED_SLOTS = 16


def _fits_compiled(size: int, prog: StmtProgram, fo: FOProgram | None = None) -> bool:
    if _compiled is None or size > _MAX_COMPILED_WORLDS:
        return False
    if size * prog.n_free > _MAX_COMPILED_LANE_BITS:
        return False
    if prog.max_stack > _MAX_COMPILED_STACK:
        return False
    if prog.n_bound > _MAX_COMPILED_BOUND or prog.n_noms > _MAX_COMPILED_NOMS:
        return False
    if fo is not None and fo.n_slots > _MAX_COMPILED_SLOTS:
        return False
    return True


def _pack_stmt(prog: StmtProgram, size: int):
    return (
        prog.n_free,
        prog.n_bound,
        prog.n_noms,
        array("q", prog.ops),
        array("q", prog.args),
        array("q", prog.starts),
        array("q", prog.ends),
        array("q", [i[0] for i in prog.ineqs]),
        array("q", [i[1] for i in prog.ineqs]),
        array("q", [i[2] for i in prog.ineqs]),
        array("Q", prop_patterns(size, prog.n_free, 1 << (size * prog.n_free))),
    )


def _pack_fo(fo: FOProgram):
    return (
        array("q", fo.kinds),
        array("q", fo.a),
        array("q", fo.b),
        fo.n_slots,
    )


def scan_stmt_vs_fo(size: int, prog: StmtProgram, fo: FOProgram, backend: str = "auto"):
    """First frame of ``size`` where validity and FO truth differ, else None."""
    use_compiled = backend == "compiled" or (
        backend == "auto" and _fits_compiled(size, prog, fo)
    )
    if use_compiled:
        return _compiled.scan_stmt_vs_fo(size, *_pack_stmt(prog, size), *_pack_fo(fo))
    return _kernel_py.scan_stmt_vs_fo(size, prog, fo)


def scan_stmt_vs_stmt(
    size: int, prog_a: StmtProgram, prog_b: StmtProgram, backend: str = "auto"
):
    """First frame of ``size`` where the two statements' validity differs."""
    use_compiled = backend == "compiled" or (
        backend == "auto" and _fits_compiled(size, prog_a) and _fits_compiled(size, prog_b)
    )
    if use_compiled:
        return _compiled.scan_stmt_vs_stmt(
            size, *_pack_stmt(prog_a, size), *_pack_stmt(prog_b, size)
        )
    return _kernel_py.scan_stmt_vs_stmt(size, prog_a, prog_b)


def valid_stmt_frame(
    size: int, r_mask: int, rp_mask: int, prog: StmtProgram, backend: str = "auto"
) -> bool:
    """Statement validity on a single frame given by relation bitmasks."""
    use_compiled = backend == "compiled" or (backend == "auto" and _fits_compiled(size, prog))
    if use_compiled:
        return _compiled.valid_stmt_frame(size, r_mask, rp_mask, *_pack_stmt(prog, size))
    return _kernel_py.valid_stmt(size, r_mask, rp_mask, prog)


def eval_fo_frame(
    size: int, r_mask: int, rp_mask: int, fo: FOProgram, backend: str = "auto"
) -> bool:
    """Closed-sentence truth on a single frame given by relation bitmasks."""
    use_compiled = backend == "compiled" or (
        backend == "auto" and _compiled is not None and fo.n_slots <= _MAX_COMPILED_SLOTS
    )
    if use_compiled:
        return _compiled.eval_fo_frame(size, r_mask, rp_mask, *_pack_fo(fo))
    return _kernel_py.eval_fo_frame(size, r_mask, rp_mask, fo)


# ---------------------------------------------------------------------------
# Fast oracle entry points (None = cannot handle, caller uses the reference)
# ---------------------------------------------------------------------------


def equivalence_oracle_fast(stmt, fo, max_size=3, sample_size4=0, seed=0):
    from . import semantics

    try:
        prog = encode_statement(stmt)
        fop = encode_fo(fo)
    except EncodingUnsupported:
        return None
    count = 0
    for size in range(1, min(max_size, 3) + 1):
        hit = scan_stmt_vs_fo(size, prog, fop)
        if hit is not None:
            r_mask, rp_mask, sv, fv = hit
            frame = semantics.frame_from_masks(size, r_mask, rp_mask)
            return semantics.Counterexample(frame, bool(sv), bool(fv))
        count += (1 << (size * size)) ** 2
    if max_size >= 4 and sample_size4 > 0:
        for r_mask, rp_mask in semantics.sampled_masks(4, sample_size4, seed):
            count += 1
            sv = valid_stmt_frame(4, r_mask, rp_mask, prog, backend="pure")
            fv = eval_fo_frame(4, r_mask, rp_mask, fop)
            if sv != fv:
                frame = semantics.frame_from_masks(4, r_mask, rp_mask)
                return semantics.Counterexample(frame, bool(sv), bool(fv))
    return semantics.Equivalent(count)


def statement_equivalence_fast(a, b, max_size=3, sample_size4=0, seed=0):
    from . import semantics

    try:
        prog_a = encode_statement(a)
        prog_b = encode_statement(b)
    except EncodingUnsupported:
        return None
    count = 0
    for size in range(1, min(max_size, 3) + 1):
        hit = scan_stmt_vs_stmt(size, prog_a, prog_b)
        if hit is not None:
            r_mask, rp_mask, va, vb = hit
            frame = semantics.frame_from_masks(size, r_mask, rp_mask)
            return semantics.Counterexample(frame, bool(va), bool(vb))
        count += (1 << (size * size)) ** 2
    if max_size >= 4 and sample_size4 > 0:
        for r_mask, rp_mask in semantics.sampled_masks(4, sample_size4, seed):
            count += 1
            va = valid_stmt_frame(4, r_mask, rp_mask, prog_a, backend="pure")
            vb = valid_stmt_frame(4, r_mask, rp_mask, prog_b, backend="pure")
            if va != vb:
                frame = semantics.frame_from_masks(4, r_mask, rp_mask)
                return semantics.Counterexample(frame, bool(va), bool(vb))
    return semantics.Equivalent(count)
