"""Numba kernels: set-valued escape iteration, raster bands, grid Hausdorff.

Everything here is deterministic per input point, so banded callers can split
work freely without changing results. Buffers are allocated once per band.

When q divides p the forward images are c + root_k * z^(p/q) with root_k the
q-th roots of unity; that path avoids the trig round-off of the polar form
and keeps algebraic orbits (such as critical orbits of integer parameters)
exactly on their cycles.
"""

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi

MODE_POLAR = 0
MODE_POWER = 1


@njit(cache=True, nogil=True)
def escape_x0(p, q, c_bound, lam):
    """Larger positive root of x^(p/q) - lam*x - c_bound = 0 by bisection.

    Returns -1.0 if no bracket is found (cannot happen for p/q > 1).
    """
    rexp = p / q
    lo = c_bound if c_bound > 1.0 else 1.0
    glo = lo ** rexp - lam * lo - c_bound
    if glo > 0.0:
        # bound already beyond the root; g(1) = 1 - lam - c_bound < 0 brackets it
        hi = lo
        lo = 1.0
    else:
        hi = lo
        ghi = glo
        doublings = 0
        while ghi <= 0.0:
            hi *= 2.0
            ghi = hi ** rexp - lam * hi - c_bound
            doublings += 1
            if doublings > 1024:
                return -1.0
    while hi - lo > 1e-12 * hi:
        mid = 0.5 * (lo + hi)
        gm = mid ** rexp - lam * mid - c_bound
        if gm <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@njit(cache=True, nogil=True)
def cpow_int(z, m):
    """z**m for m >= 1 by square and multiply."""
    result = complex(1.0, 0.0)
    base = z
    e = m
    while e > 0:
        if e & 1:
            result = result * base
        base = base * base
        e >>= 1
    return result


@njit(cache=True, nogil=True)
def _merge_lex(src, dst, lo, mid, hi):
    i = lo
    j = mid
    k = lo
    while i < mid and j < hi:
        a = src[i]
        b = src[j]
        if (b.real < a.real) or (b.real == a.real and b.imag < a.imag):
            dst[k] = b
            j += 1
        else:
            dst[k] = a
            i += 1
        k += 1
    while i < mid:
        dst[k] = src[i]
        i += 1
        k += 1
    while j < hi:
        dst[k] = src[j]
        j += 1
        k += 1


@njit(cache=True, nogil=True)
def lex_sort(arr, buf, n):
    """Stable sort of arr[:n] by (re, im), using buf[:n] as scratch."""
    if n < 2:
        return
    in_arr = True
    width = 1
    while width < n:
        lo = 0
        while lo < n:
            mid = lo + width
            if mid > n:
                mid = n
            hi = lo + 2 * width
            if hi > n:
                hi = n
            if in_arr:
                _merge_lex(arr, buf, lo, mid, hi)
            else:
                _merge_lex(buf, arr, lo, mid, hi)
            lo = hi
        in_arr = not in_arr
        width *= 2
    if not in_arr:
        for i in range(n):
            arr[i] = buf[i]


@njit(cache=True, nogil=True)
def _merge_mod(src, dst, lo, mid, hi):
    i = lo
    j = mid
    k = lo
    while i < mid and j < hi:
        a = src[i]
        b = src[j]
        ma = a.real * a.real + a.imag * a.imag
        mb = b.real * b.real + b.imag * b.imag
        if (mb < ma) or (mb == ma and ((b.real < a.real) or (b.real == a.real and b.imag < a.imag))):
            dst[k] = b
            j += 1
        else:
            dst[k] = a
            i += 1
        k += 1
    while i < mid:
        dst[k] = src[i]
        i += 1
        k += 1
    while j < hi:
        dst[k] = src[j]
        j += 1
        k += 1


@njit(cache=True, nogil=True)
def mod_sort(arr, buf, n):
    """Stable sort of arr[:n] by (|z|^2, re, im)."""
    if n < 2:
        return
    in_arr = True
    width = 1
    while width < n:
        lo = 0
        while lo < n:
            mid = lo + width
            if mid > n:
                mid = n
            hi = lo + 2 * width
            if hi > n:
                hi = n
            if in_arr:
                _merge_mod(arr, buf, lo, mid, hi)
            else:
                _merge_mod(buf, arr, lo, mid, hi)
            lo = hi
        in_arr = not in_arr
        width *= 2
    if not in_arr:
        for i in range(n):
            arr[i] = buf[i]


@njit(cache=True, nogil=True)
def set_step(cur, ncur, out, buf, p, q, m, mode, roots, c, radius, merge_eps, cap):
    """One forward step of the live set: images, prune, sort, dedup, cap.

    Images of z != 0 are c + |z|^(p/q) * exp(i*(p*arg z + 2*pi*k)/q), k < q,
    with arg in (-pi, pi]; the power path (q | p) computes them as
    c + roots[k] * z^m. The critical point contributes the single image c.
    Returns (count, truncated); out[:count] is canonically sorted and pairwise
    separated by at least merge_eps.
    """
    rexp = p / q
    r2 = radius * radius
    eps2 = merge_eps * merge_eps
    n_out = 0
    for i in range(ncur):
        z = cur[i]
        if z.real == 0.0 and z.imag == 0.0:
            if c.real * c.real + c.imag * c.imag <= r2:
                out[n_out] = c
                n_out += 1
            continue
        if mode == MODE_POWER:
            zm = cpow_int(z, m)
            for k in range(q):
                w = c + roots[k] * zm
                if w.real * w.real + w.imag * w.imag <= r2:
                    out[n_out] = w
                    n_out += 1
        else:
            mod = math.hypot(z.real, z.imag)
            th = math.atan2(z.imag, z.real)
            if th == -math.pi:
                th = math.pi
            rad = mod ** rexp
            base = (p * th) / q
            for k in range(q):
                ang = base + (TWO_PI * k) / q
                wre = c.real + rad * math.cos(ang)
                wim = c.imag + rad * math.sin(ang)
                if wre * wre + wim * wim <= r2:
                    out[n_out] = complex(wre, wim)
                    n_out += 1
    lex_sort(out, buf, n_out)
    # greedy dedup in canonical order; merge_eps is tiny so the re-window is short
    kept = 0
    for i in range(n_out):
        z = out[i]
        ok = True
        j = kept - 1
        while j >= 0:
            d = out[j]
            if z.real - d.real >= merge_eps:
                break
            dre = z.real - d.real
            dim = z.imag - d.imag
            if dre * dre + dim * dim < eps2:
                ok = False
                break
            j -= 1
        if ok:
            out[kept] = z
            kept += 1
    truncated = False
    if kept > cap:
        # keep the cap points closest to the origin (least likely to escape)
        mod_sort(out, buf, kept)
        kept = cap
        lex_sort(out, buf, kept)
        truncated = True
    return kept, truncated


@njit(cache=True, nogil=True)
def membership(z, c, p, q, m, mode, roots, radius, max_iter, merge_eps, cap, wa, wb, buf):
    """Escape verdict for z: (inside, steps, truncated).

    inside=True means the live set was still nonempty after max_iter steps.
    steps is the first step with an empty live set, or max_iter.
    """
    if z.real * z.real + z.imag * z.imag > radius * radius:
        return False, 0, False
    wa[0] = z
    ncur = 1
    trunc = False
    a = wa
    b = wb
    for it in range(1, max_iter + 1):
        n2, t = set_step(a, ncur, b, buf, p, q, m, mode, roots, c, radius, merge_eps, cap)
        if t:
            trunc = True
        if n2 == 0:
            return False, it, trunc
        tmp = a
        a = b
        b = tmp
        ncur = n2
    return True, max_iter, trunc


@njit(cache=True, nogil=True)
def render_julia_band(data, j0, j1, nx, xleft, ytop, pw, ph, c, p, q, m, mode, roots,
                      radius, max_iter, merge_eps, cap, supersample):
    wa = np.empty(cap * q, np.complex128)
    wb = np.empty(cap * q, np.complex128)
    buf = np.empty(cap * q, np.complex128)
    for j in range(j0, j1):
        for i in range(nx):
            if supersample:
                v = 65535
                for sj in range(2):
                    for si in range(2):
                        x = xleft + (i + 0.25 + 0.5 * si) * pw
                        y = ytop - (j + 0.25 + 0.5 * sj) * ph
                        ins, steps, _ = membership(complex(x, y), c, p, q, m, mode, roots,
                                                   radius, max_iter, merge_eps, cap, wa, wb, buf)
                        val = 0 if ins else min(steps + 1, 65535)
                        if val < v:
                            v = val
                data[j, i] = v
            else:
                x = xleft + (i + 0.5) * pw
                y = ytop - (j + 0.5) * ph
                ins, steps, _ = membership(complex(x, y), c, p, q, m, mode, roots,
                                           radius, max_iter, merge_eps, cap, wa, wb, buf)
                data[j, i] = 0 if ins else min(steps + 1, 65535)


@njit(cache=True, nogil=True)
def render_multibrot_band(data, j0, j1, nx, xleft, ytop, pw, ph, p, q, m, mode, roots,
                          lam, margin, max_iter, merge_eps, cap, supersample):
    wa = np.empty(cap * q, np.complex128)
    wb = np.empty(cap * q, np.complex128)
    buf = np.empty(cap * q, np.complex128)
    zero = complex(0.0, 0.0)
    for j in range(j0, j1):
        for i in range(nx):
            if supersample:
                v = 65535
                for sj in range(2):
                    for si in range(2):
                        x = xleft + (i + 0.25 + 0.5 * si) * pw
                        y = ytop - (j + 0.25 + 0.5 * sj) * ph
                        c = complex(x, y)
                        radius = escape_x0(p, q, abs(c), lam) * (1.0 + margin)
                        ins, steps, _ = membership(zero, c, p, q, m, mode, roots, radius,
                                                   max_iter, merge_eps, cap, wa, wb, buf)
                        val = 0 if ins else min(steps + 1, 65535)
                        if val < v:
                            v = val
                data[j, i] = v
            else:
                x = xleft + (i + 0.5) * pw
                y = ytop - (j + 0.5) * ph
                c = complex(x, y)
                radius = escape_x0(p, q, abs(c), lam) * (1.0 + margin)
                ins, steps, _ = membership(zero, c, p, q, m, mode, roots, radius,
                                           max_iter, merge_eps, cap, wa, wb, buf)
                data[j, i] = 0 if ins else min(steps + 1, 65535)


@njit(cache=True, nogil=True)
def _merge_lex_pay(src, dst, psrc, pdst, lo, mid, hi):
    i = lo
    j = mid
    k = lo
    while i < mid and j < hi:
        a = src[i]
        b = src[j]
        if (b.real < a.real) or (b.real == a.real and b.imag < a.imag):
            dst[k] = b
            pdst[k] = psrc[j]
            j += 1
        else:
            dst[k] = a
            pdst[k] = psrc[i]
            i += 1
        k += 1
    while i < mid:
        dst[k] = src[i]
        pdst[k] = psrc[i]
        i += 1
        k += 1
    while j < hi:
        dst[k] = src[j]
        pdst[k] = psrc[j]
        j += 1
        k += 1


@njit(cache=True, nogil=True)
def lex_sort_pay(arr, pay, buf, pbuf, n):
    """Stable (re, im) sort of arr[:n] carrying a payload array along."""
    if n < 2:
        return
    in_arr = True
    width = 1
    while width < n:
        lo = 0
        while lo < n:
            mid = lo + width
            if mid > n:
                mid = n
            hi = lo + 2 * width
            if hi > n:
                hi = n
            if in_arr:
                _merge_lex_pay(arr, buf, pay, pbuf, lo, mid, hi)
            else:
                _merge_lex_pay(buf, arr, pbuf, pay, lo, mid, hi)
            lo = hi
        in_arr = not in_arr
        width *= 2
    if not in_arr:
        for i in range(n):
            arr[i] = buf[i]
            pay[i] = pbuf[i]


@njit(cache=True, nogil=True)
def set_step_de(cur, curd, ncur, out, outd, buf, pbuf, p, q, m, mode, roots, c,
                radius, merge_eps, cap, param_mode):
    """set_step variant carrying the orbit derivative of every live point.

    Derivatives follow d_next = f'(z) * d (+ 1 in parameter mode); the branch
    derivative is (p/q) * (w - c) / z. Returns (count, truncated, est) where
    est is the smallest distance estimate |w| log|w| / |w'| over the images
    pruned at this step (inf when nothing was pruned).
    """
    rexp = p / q
    r2 = radius * radius
    eps2 = merge_eps * merge_eps
    pruned_est = 1.0e308
    n_out = 0
    for i in range(ncur):
        z = cur[i]
        dz = curd[i]
        if z.real == 0.0 and z.imag == 0.0:
            w = c
            dw = 1.0 + 0j if param_mode else 0j
            if w.real * w.real + w.imag * w.imag <= r2:
                out[n_out] = w
                outd[n_out] = dw
                n_out += 1
            else:
                aw = abs(w)
                adw = abs(dw)
                est = aw * math.log(aw) / adw if adw > 0.0 else 1.0e308
                if est < pruned_est:
                    pruned_est = est
            continue
        if mode == MODE_POWER:
            zm = cpow_int(z, m)
            for k in range(q):
                w = c + roots[k] * zm
                fp = rexp * (w - c) / z
                dw = fp * dz + (1.0 + 0j if param_mode else 0j)
                if w.real * w.real + w.imag * w.imag <= r2:
                    out[n_out] = w
                    outd[n_out] = dw
                    n_out += 1
                else:
                    aw = abs(w)
                    adw = abs(dw)
                    est = aw * math.log(aw) / adw if adw > 0.0 else 1.0e308
                    if est < pruned_est:
                        pruned_est = est
        else:
            modz = math.hypot(z.real, z.imag)
            th = math.atan2(z.imag, z.real)
            if th == -math.pi:
                th = math.pi
            rad = modz ** rexp
            base = (p * th) / q
            for k in range(q):
                ang = base + (TWO_PI * k) / q
                w = complex(c.real + rad * math.cos(ang), c.imag + rad * math.sin(ang))
                fp = rexp * (w - c) / z
                dw = fp * dz + (1.0 + 0j if param_mode else 0j)
                if w.real * w.real + w.imag * w.imag <= r2:
                    out[n_out] = w
                    outd[n_out] = dw
                    n_out += 1
                else:
                    aw = abs(w)
                    adw = abs(dw)
                    est = aw * math.log(aw) / adw if adw > 0.0 else 1.0e308
                    if est < pruned_est:
                        pruned_est = est
    lex_sort_pay(out, outd, buf, pbuf, n_out)
    kept = 0
    for i in range(n_out):
        z = out[i]
        ok = True
        j = kept - 1
        while j >= 0:
            d = out[j]
            if z.real - d.real >= merge_eps:
                break
            dre = z.real - d.real
            dim = z.imag - d.imag
            if dre * dre + dim * dim < eps2:
                ok = False
                break
            j -= 1
        if ok:
            out[kept] = z
            outd[kept] = outd[i]
            kept += 1
    truncated = False
    if kept > cap:
        # order by modulus while keeping payload attached: reuse the lex pair
        # sort on (|z|^2, re, im) via a temporary remap is avoided by a simple
        # selection: points are already deduplicated, so sort by modulus key
        _mod_sort_pay(out, outd, buf, pbuf, kept)
        kept = cap
        lex_sort_pay(out, outd, buf, pbuf, kept)
        truncated = True
    return kept, truncated, pruned_est


@njit(cache=True, nogil=True)
def _merge_mod_pay(src, dst, psrc, pdst, lo, mid, hi):
    i = lo
    j = mid
    k = lo
    while i < mid and j < hi:
        a = src[i]
        b = src[j]
        ma = a.real * a.real + a.imag * a.imag
        mb = b.real * b.real + b.imag * b.imag
        if (mb < ma) or (mb == ma and ((b.real < a.real) or (b.real == a.real and b.imag < a.imag))):
            dst[k] = b
            pdst[k] = psrc[j]
            j += 1
        else:
            dst[k] = a
            pdst[k] = psrc[i]
            i += 1
        k += 1
    while i < mid:
        dst[k] = src[i]
        pdst[k] = psrc[i]
        i += 1
        k += 1
    while j < hi:
        dst[k] = src[j]
        pdst[k] = psrc[j]
        j += 1
        k += 1


@njit(cache=True, nogil=True)
def _mod_sort_pay(arr, pay, buf, pbuf, n):
    if n < 2:
        return
    in_arr = True
    width = 1
    while width < n:
        lo = 0
        while lo < n:
            mid = lo + width
            if mid > n:
                mid = n
            hi = lo + 2 * width
            if hi > n:
                hi = n
            if in_arr:
                _merge_mod_pay(arr, buf, pay, pbuf, lo, mid, hi)
            else:
                _merge_mod_pay(buf, arr, pbuf, pay, lo, mid, hi)
            lo = hi
        in_arr = not in_arr
        width *= 2
    if not in_arr:
        for i in range(n):
            arr[i] = buf[i]
            pay[i] = pbuf[i]


@njit(cache=True, nogil=True)
def membership_de(z, c, p, q, m, mode, roots, radius, max_iter, merge_eps, cap,
                  wa, wb, da, db, buf, pbuf, param_mode):
    """membership variant returning (inside, steps, truncated, dist_estimate).

    dist_estimate approximates the distance to the filled set along the
    longest-surviving branch (0 when the point is inside at depth max_iter).
    """
    if z.real * z.real + z.imag * z.imag > radius * radius:
        aw = abs(z)
        est = aw * math.log(max(aw, 1.0000001)) if aw > radius else 0.0
        return False, 0, False, est
    wa[0] = z
    da[0] = 0j if param_mode else 1.0 + 0j
    ncur = 1
    trunc = False
    a = wa
    b = wb
    pa = da
    pb = db
    for it in range(1, max_iter + 1):
        n2, t, est = set_step_de(a, pa, ncur, b, pb, buf, pbuf, p, q, m, mode, roots,
                                 c, radius, merge_eps, cap, param_mode)
        if t:
            trunc = True
        if n2 == 0:
            return False, it, trunc, est
        tmp = a
        a = b
        b = tmp
        tmpp = pa
        pa = pb
        pb = tmpp
        ncur = n2
    return True, max_iter, trunc, 0.0


@njit(cache=True, nogil=True)
def render_distance_band(dist, j0, j1, nx, xleft, ytop, pw, ph, c, p, q, m, mode,
                         roots, radius, lam, margin, max_iter, merge_eps, cap, param_mode):
    """Distance-estimate raster; param_mode renders the parameter plane from
    the critical point with a per-pixel escape radius."""
    wa = np.empty(cap * q, np.complex128)
    wb = np.empty(cap * q, np.complex128)
    da = np.empty(cap * q, np.complex128)
    db = np.empty(cap * q, np.complex128)
    buf = np.empty(cap * q, np.complex128)
    pbuf = np.empty(cap * q, np.complex128)
    for j in range(j0, j1):
        y = ytop - (j + 0.5) * ph
        for i in range(nx):
            x = xleft + (i + 0.5) * pw
            if param_mode:
                cc = complex(x, y)
                rad_c = escape_x0(p, q, abs(cc), lam) * (1.0 + margin)
                ins, _, _, est = membership_de(complex(0.0, 0.0), cc, p, q, m, mode,
                                               roots, rad_c, max_iter, merge_eps,
                                               cap, wa, wb, da, db, buf, pbuf, True)
            else:
                ins, _, _, est = membership_de(complex(x, y), c, p, q, m, mode,
                                               roots, radius, max_iter, merge_eps,
                                               cap, wa, wb, da, db, buf, pbuf, False)
            dist[j, i] = 0.0 if ins else est


@njit(cache=True, nogil=True)
def _scan_cell(z, bpts, order, cell_start, nx, cx, cy, best2):
    cid = cy * nx + cx
    for s in range(cell_start[cid], cell_start[cid + 1]):
        w = bpts[order[s]]
        dre = z.real - w.real
        dim = z.imag - w.imag
        d2 = dre * dre + dim * dim
        if d2 < best2:
            best2 = d2
    return best2


@njit(cache=True, nogil=True)
def directed_hausdorff_grid(qpts, bpts, order, cell_start, nx, ny, x0, y0, cw, ch):
    """sup over qpts of the exact nearest-neighbour distance into bpts.

    bpts are indexed by a uniform nx*ny grid (CSR layout: order, cell_start).
    Ring search is exact: ring k is skipped only once (k-1)*min(cw,ch)
    already exceeds the best distance found; rings are clipped to the grid.
    """
    mincell = cw if cw < ch else ch
    worst2 = 0.0
    for t in range(qpts.shape[0]):
        z = qpts[t]
        qcx = int(math.floor((z.real - x0) / cw))
        qcy = int(math.floor((z.imag - y0) / ch))
        kx = abs(qcx) if abs(qcx) > abs(nx - 1 - qcx) else abs(nx - 1 - qcx)
        ky = abs(qcy) if abs(qcy) > abs(ny - 1 - qcy) else abs(ny - 1 - qcy)
        ring_max = kx if kx > ky else ky
        rx = 0 if 0 <= qcx < nx else (-qcx if qcx < 0 else qcx - (nx - 1))
        ry = 0 if 0 <= qcy < ny else (-qcy if qcy < 0 else qcy - (ny - 1))
        ring_min = rx if rx > ry else ry
        best2 = 1.0e308
        for ring in range(ring_min, ring_max + 1):
            if ring >= 1:
                lb = (ring - 1) * mincell
                if lb * lb > best2:
                    break
            cx_lo = qcx - ring
            cx_hi = qcx + ring
            cy_lo = qcy - ring
            cy_hi = qcy + ring
            cy_a = cy_lo if cy_lo > 0 else 0
            cy_b = cy_hi if cy_hi < ny - 1 else ny - 1
            for cy in range(cy_a, cy_b + 1):
                if cy == cy_lo or cy == cy_hi or ring == 0:
                    cx_a = cx_lo if cx_lo > 0 else 0
                    cx_b = cx_hi if cx_hi < nx - 1 else nx - 1
                    for cx in range(cx_a, cx_b + 1):
                        best2 = _scan_cell(z, bpts, order, cell_start, nx, cx, cy, best2)
                else:
                    if 0 <= cx_lo < nx:
                        best2 = _scan_cell(z, bpts, order, cell_start, nx, cx_lo, cy, best2)
                    if cx_hi != cx_lo and 0 <= cx_hi < nx:
                        best2 = _scan_cell(z, bpts, order, cell_start, nx, cx_hi, cy, best2)
        if best2 > worst2:
            worst2 = best2
    return math.sqrt(worst2)
