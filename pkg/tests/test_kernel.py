"""Backend agreement: compiled kernel, pure kernel, and reference oracle."""

import pytest

from modalcorr import _encode, _kernel_py, fol, kernel, semantics
from modalcorr.fol import standard_translation_statement, simplify_fo
from modalcorr.semantics import frame_to_masks, valid
from modalcorr.syntax import parse_statement

STATEMENTS = [
    "p prec q => p <= q",
    "sdia p <= q => sdia sdia p <= q",
    "box p <= q => p <= dia q",
    "p <= q & q <= r => p <= r",
    "T <= T => @i0 <= ~@i1",
    "@i <= sdia @i",
    "sbdia @j <= sdia @j",
    "p prec q => E c. (p prec c & c prec q)",
    "p <= box q => E c. (p <= box c & c <= q)",
]


@pytest.mark.parametrize("text", STATEMENTS)
def test_pure_kernel_matches_reference_validity(text):
    stmt = parse_statement(text)
    prog = _encode.encode_statement(stmt)
    for size in (1, 2):
        for frame in semantics.all_frames(size):
            r_mask, rp_mask = frame_to_masks(frame)
            assert _kernel_py.valid_stmt(size, r_mask, rp_mask, prog) == valid(
                frame, stmt
            ), (text, frame)


@pytest.mark.parametrize("text", STATEMENTS)
def test_pure_kernel_matches_reference_on_sampled_size3(text):
    stmt = parse_statement(text)
    prog = _encode.encode_statement(stmt)
    for frame in semantics.sampled_frames(3, 25, seed=11):
        r_mask, rp_mask = frame_to_masks(frame)
        assert _kernel_py.valid_stmt(3, r_mask, rp_mask, prog) == valid(frame, stmt)


@pytest.mark.skipif(not kernel.has_compiled(), reason="compiled kernel unavailable")
@pytest.mark.parametrize("text", STATEMENTS)
def test_compiled_matches_pure_validity(text):
    stmt = parse_statement(text)
    prog = _encode.encode_statement(stmt)
    for size in (1, 2, 3):
        if not kernel._fits_compiled(size, prog):
            continue
        frames = (
            semantics.all_frames(size)
            if size <= 2
            else semantics.sampled_frames(3, 40, seed=2)
        )
        for frame in frames:
            r_mask, rp_mask = frame_to_masks(frame)
            assert kernel.valid_stmt_frame(
                size, r_mask, rp_mask, prog, backend="compiled"
            ) == _kernel_py.valid_stmt(size, r_mask, rp_mask, prog)


def test_three_variable_statement_uses_pure_fallback():
    prog = _encode.encode_statement(parse_statement("p <= q & q <= r => p <= r"))
    assert not kernel._fits_compiled(3, prog)
    # auto mode must still answer correctly via the pure path
    frame = semantics.frame_from_masks(3, 0, 0)
    r_mask, rp_mask = frame_to_masks(frame)
    assert kernel.valid_stmt_frame(3, r_mask, rp_mask, prog) == valid(
        frame, parse_statement("p <= q & q <= r => p <= r")
    )


def test_fo_eval_agreement():
    fo = simplify_fo(standard_translation_statement(parse_statement("@i <= sdia @i")))
    fop = _encode.encode_fo(fo)
    for size in (1, 2):
        for frame in semantics.all_frames(size):
            r_mask, rp_mask = frame_to_masks(frame)
            expected = semantics.eval_fo(frame, fo, {})
            assert _kernel_py.eval_fo_frame(size, r_mask, rp_mask, fop) == expected
            if kernel.has_compiled():
                assert (
                    kernel.eval_fo_frame(size, r_mask, rp_mask, fop, backend="compiled")
                    == expected
                )


def test_scan_agreement_on_goldens():
    pairs = [
        ("p prec q => p <= q", fol.Forall("w", fol.Rel2("R", "w", "w"))),
        (
            "p prec q => p <= q",
            fol.Forall("w", fol.Forall("v", fol.Rel2("R", "w", "v"))),
        ),
    ]
    for text, fo in pairs:
        stmt = parse_statement(text)
        auto = semantics.equivalence_oracle(stmt, fo, max_size=2)
        ref = semantics.equivalence_oracle(stmt, fo, max_size=2, backend="reference")
        assert auto == ref


def test_encoding_rejects_predicates():
    fo = fol.Forall("x", fol.Pred("p", "x"))
    with pytest.raises(_encode.EncodingUnsupported):
        _encode.encode_fo(fo)


def test_statement_equivalence_fast_agrees():
    a = parse_statement("p prec q => E c. (p prec c & c prec q)")
    b = parse_statement("sdia p <= q => sdia sdia p <= q")
    fast = semantics.statement_equivalence_oracle(a, b, max_size=2)
    ref = semantics.statement_equivalence_oracle(a, b, max_size=2, backend="reference")
    assert fast == ref
    assert isinstance(fast, semantics.Equivalent)
