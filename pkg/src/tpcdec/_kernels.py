"""Compiled inner loops: algebraic BDD and the fused Chase/soft-output pass.

Every function here works on plain integer/float arrays so numba can compile
it in nopython mode. The public modules wrap these with typed objects.
"""

import numpy as np
from numba import njit

RULE_PROPOSED = 0
RULE_PYNDIAH = 1

NEG_INF = -np.inf


@njit(cache=True, inline="always")
def _gmul(a, b, exp, log):
    if a == 0 or b == 0:
        return 0
    return exp[log[a] + log[b]]


@njit(cache=True)
def berlekamp_massey(syn, exp, log, order, locator, prev, tmp):
    """Error-locator polynomial for syndromes S_1..S_2t; returns its degree.

    ``locator`` (length 2t+1) receives the coefficients, constant term first;
    ``prev`` and ``tmp`` are scratch of the same length.
    """
    nsyn = syn.shape[0]
    prev[:] = 0
    locator[:] = 0
    locator[0] = 1
    prev[0] = 1
    deg = 0
    shift = 1
    last_disc = 1
    for r in range(nsyn):
        disc = syn[r]
        for i in range(1, deg + 1):
            disc ^= _gmul(locator[i], syn[r - i], exp, log)
        if disc == 0:
            shift += 1
            continue
        coef_log = log[disc] - log[last_disc] + order
        if 2 * deg <= r:
            tmp[:] = locator
            for i in range(nsyn + 1 - shift):
                if prev[i] != 0:
                    locator[i + shift] ^= exp[(coef_log + log[prev[i]]) % order]
            deg = r + 1 - deg
            prev[:] = tmp
            last_disc = disc
            shift = 1
        else:
            for i in range(nsyn + 1 - shift):
                if prev[i] != 0:
                    locator[i + shift] ^= exp[(coef_log + log[prev[i]]) % order]
            shift += 1
    return deg


@njit(cache=True)
def chien_search(locator, deg, exp, log, order, n_base, positions):
    """Word positions of the roots of the locator; returns the root count.

    Position ``pos`` carries exponent ``n_base - 1 - pos``; a root at
    alpha^-e flags exponent e.
    """
    if deg == 1:
        # 1 + s1*x has the single root 1/s1, i.e. exponent log(s1).
        e = log[locator[1]]
        if e >= n_base:
            return 0
        positions[0] = n_base - 1 - e
        return 1
    # incremental evaluation: term i of locator(alpha^-e) has log c_i - i*e
    terms = np.empty(deg + 1, dtype=np.int64)
    for i in range(1, deg + 1):
        terms[i] = log[locator[i]] if locator[i] != 0 else -1
    found = 0
    for e in range(n_base):
        acc = locator[0]
        for i in range(1, deg + 1):
            lt = terms[i]
            if lt >= 0:
                acc ^= exp[lt]
                lt -= i
                if lt < 0:
                    lt += order
                terms[i] = lt
        if acc == 0:
            positions[found] = n_base - 1 - e
            found += 1
            if found == deg:
                break
    return found


@njit(cache=True)
def bdd_error_positions(syn, t, exp, log, order, n_base, positions):
    """Bounded-distance decode from syndromes.

    Returns the number of error positions written to ``positions`` or -1
    when no codeword lies within radius ``t``.
    """
    scratch = np.zeros((3, syn.shape[0] + 1), dtype=np.int64)
    return _bdd(syn, t, exp, log, order, n_base, positions, scratch)


@njit(cache=True)
def _bdd(syn, t, exp, log, order, n_base, positions, scratch):
    """Bounded-distance decode from syndromes.

    Returns the number of error positions written to ``positions`` or -1
    when no codeword lies within radius ``t``.
    """
    nonzero = False
    for j in range(syn.shape[0]):
        if syn[j] != 0:
            nonzero = True
            break
    if not nonzero:
        return 0
    locator = scratch[0]
    deg = berlekamp_massey(syn, exp, log, order, locator, scratch[1], scratch[2])
    if deg > t:
        return -1
    found = chien_search(locator, deg, exp, log, order, n_base, positions)
    if found != deg:
        return -1
    return found


@njit(cache=True)
def word_syndrome(bits, syn_table, n_base):
    syn = np.zeros(syn_table.shape[1], dtype=np.int64)
    for pos in range(n_base):
        if bits[pos]:
            for j in range(syn.shape[0]):
                syn[j] ^= syn_table[pos, j]
    return syn


@njit(cache=True, inline="always")
def _psi(delta, lam1, lam2, mu):
    a = lam1 * (delta - mu)
    b = lam2 * (delta - mu)
    return a if a > b else b


@njit(cache=True)
def _contains(row, length, pos):
    for j in range(length):
        if row[j] == pos:
            return True
    return False


@njit(cache=True)
def component_siso(
    llr, n_base, extended, t, t_prime, p, syn_table, exp, log, order,
    rule, lam1, lam2, mu, beta, ext,
):
    """Chase-II list + soft output for one component word; fills ``ext``.

    Candidates are kept as sorted sets of positions where they differ from
    the hard decision, so correlations and dedup never touch all n bits.
    Returns the list size.
    """
    n = llr.shape[0]
    nsyn = syn_table.shape[1]
    absl = np.abs(llr)
    hard = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        if llr[i] < 0:
            hard[i] = 1
    rank = np.argsort(absl, kind="mergesort")
    corr_hard = 2.0 * absl.sum()

    syn0 = np.zeros(nsyn, dtype=np.int64)
    base_par = 0
    for pos in range(n_base):
        if hard[pos]:
            base_par ^= 1
            for j in range(nsyn):
                syn0[j] ^= syn_table[pos, j]

    npat = 1 << p
    maxd = p + t + 1
    diffs = np.empty((npat, maxd), dtype=np.int64)
    dlen = np.zeros(npat, dtype=np.int64)
    corr = np.empty(npat, dtype=np.float64)
    ncand = 0

    syn = np.empty(nsyn, dtype=np.int64)
    errs = np.empty(t + 1, dtype=np.int64)
    work = np.empty(maxd, dtype=np.int64)
    scratch = np.zeros((3, nsyn + 1), dtype=np.int64)
    for mask in range(npat):
        syn[:] = syn0
        w = 0
        for j in range(p):
            if (mask >> j) & 1:
                pos = rank[j]
                if pos < n_base:
                    for s in range(nsyn):
                        syn[s] ^= syn_table[pos, s]
                    work[w] = pos
                    w += 1
        nerr = _bdd(syn, t, exp, log, order, n_base, errs, scratch)
        if nerr < 0:
            continue
        # symmetric difference of pattern flips and corrected positions
        for e in range(nerr):
            pos = errs[e]
            hit = -1
            for j in range(w):
                if work[j] == pos:
                    hit = j
                    break
            if hit >= 0:
                work[hit] = work[w - 1]
                w -= 1
            else:
                work[w] = pos
                w += 1
        if extended and (base_par ^ (w & 1)) != hard[n - 1]:
            work[w] = n - 1
            w += 1
        # insertion sort; w is at most p + t + 1
        for a in range(1, w):
            v = work[a]
            b = a - 1
            while b >= 0 and work[b] > v:
                work[b + 1] = work[b]
                b -= 1
            work[b + 1] = v
        row = work
        dup = False
        for c in range(ncand):
            if dlen[c] == w:
                same = True
                for j in range(w):
                    if diffs[c, j] != row[j]:
                        same = False
                        break
                if same:
                    dup = True
                    break
        if dup:
            continue
        penalty = 0.0
        for j in range(w):
            diffs[ncand, j] = row[j]
            penalty += absl[row[j]]
        dlen[ncand] = w
        corr[ncand] = corr_hard - 4.0 * penalty
        ncand += 1

    if ncand == 0:
        ext[:] = 0.0
        return 0

    best = 0
    for c in range(1, ncand):
        if corr[c] > corr[best]:
            best = c

    # best correlation among candidates agreeing / disagreeing with the hard bit
    best_same = np.full(n, corr[best])
    best_flip = np.full(n, NEG_INF)
    for c in range(ncand):
        for j in range(dlen[c]):
            pos = diffs[c, j]
            if corr[c] > best_flip[pos]:
                best_flip[pos] = corr[c]
    for j in range(dlen[best]):
        pos = diffs[best, j]
        val = NEG_INF
        for c in range(ncand):
            if corr[c] > val and not _contains(diffs[c], dlen[c], pos):
                val = corr[c]
        best_same[pos] = val

    if rule == RULE_PROPOSED:
        penalty = 0.0
        for j in range(p, p + t_prime + 1):
            penalty += absl[rank[j]]
        corr_tilde = corr_hard - 4.0 * penalty
        for i in range(n):
            ps = 0.0
            pf = 0.0
            if best_same[i] != NEG_INF:
                ps = _psi(best_same[i] - corr_tilde, lam1, lam2, mu)
            if best_flip[i] != NEG_INF:
                pf = _psi(best_flip[i] - corr_tilde, lam1, lam2, mu)
            if hard[i]:
                ext[i] = pf - ps
            else:
                ext[i] = ps - pf
    else:
        for i in range(n):
            flipped = _contains(diffs[best], dlen[best], i)
            dbit = hard[i] ^ (1 if flipped else 0)
            sign = -1.0 if dbit else 1.0
            comp = best_same[i] if flipped else best_flip[i]
            if comp == NEG_INF:
                ext[i] = beta * sign
            else:
                ext[i] = sign * (corr[best] - comp) / 4.0 - llr[i]
    return ncand


@njit(cache=True)
def siso_rows(
    llr_rows, n_base, extended, t, t_prime, p, syn_table, exp, log, order,
    rule, lam1, lam2, mu, beta, ext_rows,
):
    for r in range(llr_rows.shape[0]):
        component_siso(
            llr_rows[r], n_base, extended, t, t_prime, p, syn_table, exp, log, order,
            rule, lam1, lam2, mu, beta, ext_rows[r],
        )
