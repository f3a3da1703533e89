"""Pure-Python twin of the compiled kernels.

Same function signatures, same arithmetic in the same order, so results are
bit-identical to lpplab._kernels_cy -- just much slower. Selected at import
by lpplab.kernels when the extension is unavailable (or forced via
LPPLAB_FORCE_PY=1). See benchmarks/bench_kernels.py for the gap.
"""


def lpp_first_row(w, out):
    wl = list(w)
    acc = wl[0]
    out[0] = acc
    for i in range(1, len(wl)):
        acc = acc + wl[i]
        out[i] = acc


def lpp_row_update(tprev, w, out):
    wl = list(w)
    tp = list(tprev)
    n = len(wl)
    res = [0.0] * n
    left = tp[0] + wl[0]
    res[0] = left
    for i in range(1, n):
        below = tp[i]
        if left > below:
            left = left + wl[i]
        else:
            left = below + wl[i]
        res[i] = left
    out[:] = res


def lpp_first_row_path(w, out, bits):
    lpp_first_row(w, out)
    for i in range(1, len(w)):
        bits[i >> 3] |= 1 << (i & 7)


def lpp_row_update_path(tprev, w, out, bits):
    wl = list(w)
    tp = list(tprev)
    n = len(wl)
    res = [0.0] * n
    left = tp[0] + wl[0]
    res[0] = left
    for i in range(1, n):
        below = tp[i]
        if left > below:
            left = left + wl[i]
            bits[i >> 3] |= 1 << (i & 7)
        else:
            left = below + wl[i]
        res[i] = left
    out[:] = res


def backtrack_profile(bits, n, k, profile):
    i, r = n, k
    while i > 0:
        if r == 1:
            profile[i] = 1
            i -= 1
        elif bits[r - 1, i >> 3] & (1 << (i & 7)):
            profile[i] = r
            i -= 1
        else:
            r -= 1
    profile[0] = 1


def partition_row_update(dprev, x, out):
    xl = list(x)
    dp = list(dprev)
    M = len(xl)
    res = [0.0] * (M + 1)
    run = dp[0]
    res[0] = run
    for m in range(1, M + 1):
        run = run + xl[m - 1]
        other = dp[m]
        if other > run:
            run = other
        res[m] = run
    out[:] = res


def sturm_count(d, e, x):
    dl = list(d)
    el = list(e)
    k = len(dl)
    cnt = 0
    q = dl[0] - x
    if q < 0:
        cnt += 1
    for i in range(1, k):
        if q == 0.0:
            q = 1e-300
        q = dl[i] - x - el[i - 1] * el[i - 1] / q
        if q < 0:
            cnt += 1
    return cnt


def sturm_lambda_max(d, e, tol, maxit):
    dl = list(d)
    el = list(e)
    k = len(dl)
    if k == 1:
        return dl[0], 0
    lo = dl[0] - abs(el[0])
    hi = dl[0] + abs(el[0])
    for i in range(1, k):
        r = abs(el[i - 1])
        if i < k - 1:
            r += abs(el[i])
        lo = min(lo, dl[i] - r)
        hi = max(hi, dl[i] + r)
    for it in range(maxit):
        if hi - lo <= tol:
            return 0.5 * (lo + hi), it
        mid = 0.5 * (lo + hi)
        if sturm_count(dl, el, mid) >= k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi), -1
