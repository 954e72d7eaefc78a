# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernel: bit-parallel frame scans in C.

Twin of :mod:`modalcorr._kernel_py` with identical semantics, restricted to
frames of at most 3 worlds and at most 64 valuation lanes (lane masks are
uint64).  The dispatcher in :mod:`modalcorr.kernel` enforces the limits and
falls back to the pure backend otherwise.
"""

from libc.stdint cimport uint64_t

cdef enum:
    OP_PROP = 0
    OP_NOM = 1
    OP_TOP = 2
    OP_BOT = 3
    OP_NOT = 4
    OP_AND = 5
    OP_OR = 6
    OP_IMP = 7
    OP_BOX = 8
    OP_DIA = 9
    OP_SBOX = 10
    OP_SDIA = 11
    OP_BBOX = 12
    OP_BDIA = 13
    OP_SBBOX = 14
    OP_SBDIA = 15

cdef enum:
    FO_R = 0
    FO_RP = 1
    FO_EQ = 2
    FO_TRUE = 3
    FO_FALSE = 4
    FO_NOT = 5
    FO_AND = 6
    FO_OR = 7
    FO_IMP = 8
    FO_ALL = 9
    FO_EX = 10

cdef enum:
    MAX_WORLDS = 3
    MAX_STACK = 64
    MAX_BOUND = 4
    MAX_NOMS = 8
    MAX_SLOTS = 16


cdef void _eval_formula(
    int fs, int fe,
    const long long* ops, const long long* args,
    int size, int n_free, uint64_t full, const uint64_t* patterns,
    const int* nom_world, const uint64_t* bound_vals,
    const int* r_row, const int* r_col, const int* rp_row, const int* rp_col,
    uint64_t* stack, uint64_t* out,
) noexcept nogil:
    cdef int sp = 0
    cdef int i, w, v, op, arg, w0, row
    cdef uint64_t acc
    cdef uint64_t tmp[MAX_WORLDS]
    cdef const int* neigh
    for i in range(fs, fe):
        op = <int> ops[i]
        arg = <int> args[i]
        if op == OP_PROP:
            if arg < n_free:
                for w in range(size):
                    stack[sp * MAX_WORLDS + w] = patterns[arg * size + w]
            else:
                for w in range(size):
                    stack[sp * MAX_WORLDS + w] = bound_vals[(arg - n_free) * MAX_WORLDS + w]
            sp += 1
        elif op == OP_NOM:
            w0 = nom_world[arg]
            for w in range(size):
                stack[sp * MAX_WORLDS + w] = full if w == w0 else 0
            sp += 1
        elif op == OP_TOP:
            for w in range(size):
                stack[sp * MAX_WORLDS + w] = full
            sp += 1
        elif op == OP_BOT:
            for w in range(size):
                stack[sp * MAX_WORLDS + w] = 0
            sp += 1
        elif op == OP_NOT:
            for w in range(size):
                stack[(sp - 1) * MAX_WORLDS + w] = full & ~stack[(sp - 1) * MAX_WORLDS + w]
        elif op == OP_AND:
            sp -= 1
            for w in range(size):
                stack[(sp - 1) * MAX_WORLDS + w] &= stack[sp * MAX_WORLDS + w]
        elif op == OP_OR:
            sp -= 1
            for w in range(size):
                stack[(sp - 1) * MAX_WORLDS + w] |= stack[sp * MAX_WORLDS + w]
        elif op == OP_IMP:
            sp -= 1
            for w in range(size):
                stack[(sp - 1) * MAX_WORLDS + w] = (
                    (full & ~stack[(sp - 1) * MAX_WORLDS + w]) | stack[sp * MAX_WORLDS + w]
                )
        else:
            if op == OP_BOX or op == OP_DIA:
                neigh = rp_row
            elif op == OP_BBOX or op == OP_BDIA:
                neigh = rp_col
            elif op == OP_SBOX or op == OP_SDIA:
                neigh = r_col
            else:
                neigh = r_row
            if op == OP_BOX or op == OP_SBOX or op == OP_BBOX or op == OP_SBBOX:
                for w in range(size):
                    acc = full
                    row = neigh[w]
                    for v in range(size):
                        if row >> v & 1:
                            acc &= stack[(sp - 1) * MAX_WORLDS + v]
                    tmp[w] = acc
            else:
                for w in range(size):
                    acc = 0
                    row = neigh[w]
                    for v in range(size):
                        if row >> v & 1:
                            acc |= stack[(sp - 1) * MAX_WORLDS + v]
                    tmp[w] = acc
            for w in range(size):
                stack[(sp - 1) * MAX_WORLDS + w] = tmp[w]
    for w in range(size):
        out[w] = stack[w]


cdef uint64_t _leq_mask(const uint64_t* lhs, const uint64_t* rhs, int size, uint64_t full) noexcept nogil:
    cdef uint64_t acc = full
    cdef int w
    for w in range(size):
        acc &= (full & ~lhs[w]) | rhs[w]
    return acc


cdef bint _valid_stmt(
    int size, int n_free, int n_bound, int n_noms,
    const long long* ops, const long long* args,
    const long long* starts, const long long* ends,
    const long long* il, const long long* ir, const long long* ig, int n_ineqs,
    const uint64_t* patterns,
    const int* r_row, const int* r_col, const int* rp_row, const int* rp_col,
    uint64_t* stack,
) noexcept nogil:
    cdef int n_lanes = 1 << (size * n_free)
    cdef uint64_t full
    if n_lanes >= 64:
        full = ~(<uint64_t> 0)
    else:
        full = (<uint64_t> 1 << n_lanes) - 1
    cdef int nom_world[MAX_NOMS]
    cdef uint64_t bound_vals[MAX_BOUND * MAX_WORLDS]
    cdef uint64_t lhs[MAX_WORLDS]
    cdef uint64_t rhs[MAX_WORLDS]
    cdef uint64_t ante, cons, found
    cdef long long idx, combo, n_nom_assignments, n_combos
    cdef int j, k, t, w

    n_nom_assignments = 1
    for j in range(n_noms):
        n_nom_assignments *= size

    for idx in range(n_nom_assignments):
        t = <int> idx
        for j in range(n_noms):
            nom_world[j] = t % size
            t //= size

        ante = full
        for k in range(n_ineqs):
            if ig[k] == 0:
                _eval_formula(
                    <int> starts[il[k]], <int> ends[il[k]], ops, args, size, n_free,
                    full, patterns, nom_world, bound_vals,
                    r_row, r_col, rp_row, rp_col, stack, lhs)
                _eval_formula(
                    <int> starts[ir[k]], <int> ends[ir[k]], ops, args, size, n_free,
                    full, patterns, nom_world, bound_vals,
                    r_row, r_col, rp_row, rp_col, stack, rhs)
                ante &= _leq_mask(lhs, rhs, size, full)

        if n_bound == 0:
            cons = full
            for k in range(n_ineqs):
                if ig[k] == 1:
                    _eval_formula(
                        <int> starts[il[k]], <int> ends[il[k]], ops, args, size, n_free,
                        full, patterns, nom_world, bound_vals,
                        r_row, r_col, rp_row, rp_col, stack, lhs)
                    _eval_formula(
                        <int> starts[ir[k]], <int> ends[ir[k]], ops, args, size, n_free,
                        full, patterns, nom_world, bound_vals,
                        r_row, r_col, rp_row, rp_col, stack, rhs)
                    cons &= _leq_mask(lhs, rhs, size, full)
            if ante & ~cons & full:
                return False
        else:
            found = 0
            n_combos = <long long> 1 << (size * n_bound)
            for combo in range(n_combos):
                for t in range(n_bound):
                    for w in range(size):
                        if combo >> (t * size + w) & 1:
                            bound_vals[t * MAX_WORLDS + w] = full
                        else:
                            bound_vals[t * MAX_WORLDS + w] = 0
                cons = full
                for k in range(n_ineqs):
                    if ig[k] == 1:
                        _eval_formula(
                            <int> starts[il[k]], <int> ends[il[k]], ops, args, size, n_free,
                            full, patterns, nom_world, bound_vals,
                            r_row, r_col, rp_row, rp_col, stack, lhs)
                        _eval_formula(
                            <int> starts[ir[k]], <int> ends[ir[k]], ops, args, size, n_free,
                            full, patterns, nom_world, bound_vals,
                            r_row, r_col, rp_row, rp_col, stack, rhs)
                        cons &= _leq_mask(lhs, rhs, size, full)
                found |= cons
                if found == full:
                    break
            if ante & ~found & full:
                return False
    return True


cdef bint _eval_fo(
    int i,
    const long long* kinds, const long long* a, const long long* b,
    int* env, int size, unsigned int r_mask, unsigned int rp_mask,
) noexcept nogil:
    cdef int k = <int> kinds[i]
    cdef int slot, old, w
    if k == FO_R:
        return (r_mask >> (env[a[i]] * size + env[b[i]])) & 1
    if k == FO_RP:
        return (rp_mask >> (env[a[i]] * size + env[b[i]])) & 1
    if k == FO_EQ:
        return env[a[i]] == env[b[i]]
    if k == FO_TRUE:
        return True
    if k == FO_FALSE:
        return False
    if k == FO_NOT:
        return not _eval_fo(<int> a[i], kinds, a, b, env, size, r_mask, rp_mask)
    if k == FO_AND:
        return (
            _eval_fo(<int> a[i], kinds, a, b, env, size, r_mask, rp_mask)
            and _eval_fo(<int> b[i], kinds, a, b, env, size, r_mask, rp_mask)
        )
    if k == FO_OR:
        return (
            _eval_fo(<int> a[i], kinds, a, b, env, size, r_mask, rp_mask)
            or _eval_fo(<int> b[i], kinds, a, b, env, size, r_mask, rp_mask)
        )
    if k == FO_IMP:
        return (
            not _eval_fo(<int> a[i], kinds, a, b, env, size, r_mask, rp_mask)
        ) or _eval_fo(<int> b[i], kinds, a, b, env, size, r_mask, rp_mask)
    slot = <int> a[i]
    old = env[slot]
    if k == FO_ALL:
        for w in range(size):
            env[slot] = w
            if not _eval_fo(<int> b[i], kinds, a, b, env, size, r_mask, rp_mask):
                env[slot] = old
                return False
        env[slot] = old
        return True
    # FO_EX
    for w in range(size):
        env[slot] = w
        if _eval_fo(<int> b[i], kinds, a, b, env, size, r_mask, rp_mask):
            env[slot] = old
            return True
    env[slot] = old
    return False


cdef void _build_rows(
    int size, unsigned int r_mask, unsigned int rp_mask,
    int* r_row, int* r_col, int* rp_row, int* rp_col,
) noexcept nogil:
    cdef int u, v, bit
    for u in range(size):
        r_row[u] = 0
        r_col[u] = 0
        rp_row[u] = 0
        rp_col[u] = 0
    for u in range(size):
        for v in range(size):
            bit = u * size + v
            if r_mask >> bit & 1:
                r_row[u] |= 1 << v
                r_col[v] |= 1 << u
            if rp_mask >> bit & 1:
                rp_row[u] |= 1 << v
                rp_col[v] |= 1 << u


def backend_tag():
    """Identifies the compiled backend (presence implies a successful build)."""
    return "compiled"


def valid_stmt_frame(
    int size, unsigned int r_mask, unsigned int rp_mask,
    int n_free, int n_bound, int n_noms,
    long long[::1] ops, long long[::1] args,
    long long[::1] starts, long long[::1] ends,
    long long[::1] il, long long[::1] ir, long long[::1] ig,
    unsigned long long[::1] patterns,
):
    """Statement validity on a single frame (compiled path)."""
    cdef int r_row[MAX_WORLDS]
    cdef int r_col[MAX_WORLDS]
    cdef int rp_row[MAX_WORLDS]
    cdef int rp_col[MAX_WORLDS]
    cdef uint64_t stack[MAX_STACK * MAX_WORLDS]
    cdef const uint64_t* pat = NULL
    if patterns.shape[0] > 0:
        pat = &patterns[0]
    cdef bint res
    _build_rows(size, r_mask, rp_mask, r_row, r_col, rp_row, rp_col)
    res = _valid_stmt(
        size, n_free, n_bound, n_noms,
        &ops[0], &args[0], &starts[0], &ends[0],
        &il[0], &ir[0], &ig[0], <int> il.shape[0],
        pat, r_row, r_col, rp_row, rp_col, stack)
    return bool(res)


def eval_fo_frame(
    int size, unsigned int r_mask, unsigned int rp_mask,
    long long[::1] kinds, long long[::1] a, long long[::1] b, int n_slots,
):
    """Closed-sentence truth on a single frame (compiled path)."""
    cdef int env[MAX_SLOTS]
    cdef int j
    for j in range(MAX_SLOTS):
        env[j] = 0
    return bool(
        _eval_fo(<int> kinds.shape[0] - 1, &kinds[0], &a[0], &b[0], env, size, r_mask, rp_mask)
    )


def scan_stmt_vs_fo(
    int size,
    int n_free, int n_bound, int n_noms,
    long long[::1] ops, long long[::1] args,
    long long[::1] starts, long long[::1] ends,
    long long[::1] il, long long[::1] ir, long long[::1] ig,
    unsigned long long[::1] patterns,
    long long[::1] fo_kinds, long long[::1] fo_a, long long[::1] fo_b, int fo_slots,
):
    """First frame (lexicographic R, Rp masks) where validity and FO truth differ."""
    cdef long long total = <long long> 1 << (size * size)
    cdef long long r_mask, rp_mask
    cdef long long hit_r = -1, hit_rp = -1
    cdef bint sv = False, fv = False, found = False
    cdef int r_row[MAX_WORLDS]
    cdef int r_col[MAX_WORLDS]
    cdef int rp_row[MAX_WORLDS]
    cdef int rp_col[MAX_WORLDS]
    cdef uint64_t stack[MAX_STACK * MAX_WORLDS]
    cdef int env[MAX_SLOTS]
    cdef int n_ineqs = <int> il.shape[0]
    cdef const uint64_t* pat = NULL
    if patterns.shape[0] > 0:
        pat = &patterns[0]
    cdef int j

    with nogil:
        for r_mask in range(total):
            if found:
                break
            for rp_mask in range(total):
                _build_rows(size, <unsigned int> r_mask, <unsigned int> rp_mask,
                            r_row, r_col, rp_row, rp_col)
                sv = _valid_stmt(
                    size, n_free, n_bound, n_noms,
                    &ops[0], &args[0], &starts[0], &ends[0],
                    &il[0], &ir[0], &ig[0], n_ineqs,
                    pat, r_row, r_col, rp_row, rp_col, stack)
                for j in range(MAX_SLOTS):
                    env[j] = 0
                fv = _eval_fo(
                    <int> fo_kinds.shape[0] - 1, &fo_kinds[0], &fo_a[0], &fo_b[0],
                    env, size, <unsigned int> r_mask, <unsigned int> rp_mask)
                if sv != fv:
                    hit_r = r_mask
                    hit_rp = rp_mask
                    found = True
                    break
    if found:
        return (int(hit_r), int(hit_rp), bool(sv), bool(fv))
    return None


def scan_stmt_vs_stmt(
    int size,
    int a_n_free, int a_n_bound, int a_n_noms,
    long long[::1] a_ops, long long[::1] a_args,
    long long[::1] a_starts, long long[::1] a_ends,
    long long[::1] a_il, long long[::1] a_ir, long long[::1] a_ig,
    unsigned long long[::1] a_patterns,
    int b_n_free, int b_n_bound, int b_n_noms,
    long long[::1] b_ops, long long[::1] b_args,
    long long[::1] b_starts, long long[::1] b_ends,
    long long[::1] b_il, long long[::1] b_ir, long long[::1] b_ig,
    unsigned long long[::1] b_patterns,
):
    """First frame where the two statements' validity differs."""
    cdef long long total = <long long> 1 << (size * size)
    cdef long long r_mask, rp_mask
    cdef long long hit_r = -1, hit_rp = -1
    cdef bint va = False, vb = False, found = False
    cdef int r_row[MAX_WORLDS]
    cdef int r_col[MAX_WORLDS]
    cdef int rp_row[MAX_WORLDS]
    cdef int rp_col[MAX_WORLDS]
    cdef uint64_t stack[MAX_STACK * MAX_WORLDS]
    cdef int a_n_ineqs = <int> a_il.shape[0]
    cdef int b_n_ineqs = <int> b_il.shape[0]
    cdef const uint64_t* a_pat = NULL
    cdef const uint64_t* b_pat = NULL
    if a_patterns.shape[0] > 0:
        a_pat = &a_patterns[0]
    if b_patterns.shape[0] > 0:
        b_pat = &b_patterns[0]

    with nogil:
        for r_mask in range(total):
            if found:
                break
            for rp_mask in range(total):
                _build_rows(size, <unsigned int> r_mask, <unsigned int> rp_mask,
                            r_row, r_col, rp_row, rp_col)
                va = _valid_stmt(
                    size, a_n_free, a_n_bound, a_n_noms,
                    &a_ops[0], &a_args[0], &a_starts[0], &a_ends[0],
                    &a_il[0], &a_ir[0], &a_ig[0], a_n_ineqs,
                    a_pat, r_row, r_col, rp_row, rp_col, stack)
                vb = _valid_stmt(
                    size, b_n_free, b_n_bound, b_n_noms,
                    &b_ops[0], &b_args[0], &b_starts[0], &b_ends[0],
                    &b_il[0], &b_ir[0], &b_ig[0], b_n_ineqs,
                    b_pat, r_row, r_col, rp_row, rp_col, stack)
                if va != vb:
                    hit_r = r_mask
                    hit_rp = rp_mask
                    found = True
                    break
    if found:
        return (int(hit_r), int(hit_rp), bool(va), bool(vb))
    return None
