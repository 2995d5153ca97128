"""Pure-Python quadrature kernel.

Fallback used when the compiled extension is not available. Implements the
same floating-point operation sequence as ``_kernels.pyx`` so the two
backends agree to the last few ulp; do not "simplify" the arithmetic here
without mirroring the change in the .pyx file.
"""
import math

BACKEND = "python"

_TWO_PI = 2.0 * math.pi
_NEG_INF = float("-inf")


def quad_sum(times, x, tprime, values, lam, h, sa, ca, guard, log_cutoff, out, skipped):
    """Accumulate the contour quadrature sum for every requested time.

    Layout contract (prepared by the engine in ``sectlap.quadrature``):
    ``x``/``tprime`` hold abscissae and contour derivatives in node order
    k = -n..n, ``values`` is the (2n+1, D) array of transform evaluations,
    ``out`` is (T, D) complex and ``skipped`` is (T,) int64. Terms are
    combined pairwise (k, -k), outermost pair first, k = 0 last. The
    exponential is anchored at the contour apex: exp(t*z_k) is evaluated as
    exp(t*lam*(1-sa)) * exp(-t*lam*sa*(cosh x_k - 1)) * cis(-t*lam*ca*sinh x_k)
    so the dominant terms carry no argument rounding.
    """
    K = x.shape[0]
    n = (K - 1) // 2
    D = values.shape[1]
    T = times.shape[0]
    c = lam * h / _TWO_PI

    xs = [float(v) for v in x]
    tpr = [float(v.real) for v in tprime]
    tpi = [float(v.imag) for v in tprime]
    vr = [[float(values[i, d].real) for d in range(D)] for i in range(K)]
    vi = [[float(values[i, d].imag) for d in range(D)] for i in range(K)]

    q = [0.0] * K   # cosh(x) - 1, cancellation-free
    p = [0.0] * K   # sinh(x)
    lw = [0.0] * K  # log(c * |T'(x_k)|)
    lv = [0.0] * K  # log ||U_k||
    for i in range(K):
        sh = math.sinh(xs[i] / 2.0)
        q[i] = 2.0 * (sh * sh)
        p[i] = math.sinh(xs[i])
        lw[i] = math.log(c * math.hypot(tpr[i], tpi[i]))
        acc = 0.0
        for d in range(D):
            acc += vr[i][d] * vr[i][d] + vi[i][d] * vi[i][d]
        nrm = math.sqrt(acc)
        lv[i] = math.log(nrm) if nrm > 0.0 else _NEG_INF

    for j in range(T):
        t = float(times[j])
        e0a = t * lam * (1.0 - sa)
        e0 = math.exp(e0a)
        tls = t * lam * sa
        tlc = t * lam * ca
        accr = [0.0] * D
        acci = [0.0] * D
        nskip = 0

        def term(i):
            nonlocal nskip
            if guard and (e0a - tls * q[i]) + lv[i] + lw[i] < log_cutoff:
                nskip += 1
                return None
            er = e0 * math.exp(-tls * q[i])
            ar = -tlc * p[i]
            ewr = er * math.cos(ar)
            ewi = er * math.sin(ar)
            # w = (i*c) * ew * T'(x_k)
            wr = -c * ewi
            wi = c * ewr
            w2r = wr * tpr[i] - wi * tpi[i]
            w2i = wr * tpi[i] + wi * tpr[i]
            return w2r, w2i

        for k in range(n, 0, -1):
            wp = term(n + k)
            wm = term(n - k)
            for d in range(D):
                if wp is None:
                    pr = pi = 0.0
                else:
                    pr = wp[0] * vr[n + k][d] - wp[1] * vi[n + k][d]
                    pi = wp[0] * vi[n + k][d] + wp[1] * vr[n + k][d]
                if wm is None:
                    mr = mi = 0.0
                else:
                    mr = wm[0] * vr[n - k][d] - wm[1] * vi[n - k][d]
                    mi = wm[0] * vi[n - k][d] + wm[1] * vr[n - k][d]
                accr[d] += pr + mr
                acci[d] += pi + mi
        w0 = term(n)
        for d in range(D):
            if w0 is None:
                zr = zi = 0.0
            else:
                zr = w0[0] * vr[n][d] - w0[1] * vi[n][d]
                zi = w0[0] * vi[n][d] + w0[1] * vr[n][d]
            accr[d] += zr
            acci[d] += zi

        for d in range(D):
            out[j, d] = complex(accr[d], acci[d])
        skipped[j] = nskip
