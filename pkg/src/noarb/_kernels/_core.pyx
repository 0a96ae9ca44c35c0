# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Line-for-line mirror of ``_pure.py`` with C doubles and the same libm
calls, so both backends return bit-identical results. Keep the two files
in lockstep; ``_pure.py`` carries the algorithm documentation.

Must be compiled without -ffast-math / -march=native: value-changing
optimizations would break the bit parity contract (see setup.py).
"""

import numpy as np

from libc.math cimport exp, log, sqrt, floor
from libc.stdint cimport uint64_t

BACKEND = "compiled"

cdef double _INV_SQRT2 = 0.7071067811865476
cdef double _INV_SQRT_2PI = 0.3989422804014327
cdef double _TWO_NEG53 = 1.1102230246251565e-16
cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15UL


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

cdef double _erfc(double x) noexcept nogil:
    cdef double y = x if x >= 0.0 else -x
    cdef double ysq, num, den, erf_val, result, dl
    if y <= 0.46875:
        ysq = y * y if y > 1.1754943508222875e-38 else 0.0
        num = 1.85777706184603153e-1 * ysq
        den = ysq
        num = (num + 3.16112374387056560e0) * ysq
        den = (den + 2.36012909523441209e1) * ysq
        num = (num + 1.13864154151050156e2) * ysq
        den = (den + 2.44024637934444173e2) * ysq
        num = (num + 3.77485237685302021e2) * ysq
        den = (den + 1.28261652607737228e3) * ysq
        erf_val = x * (num + 3.20937758913846947e3) / (den + 2.84423683343917062e3)
        return 1.0 - erf_val
    if y <= 4.0:
        num = 2.15311535474403846e-8 * y
        den = y
        num = (num + 5.64188496988670089e-1) * y
        den = (den + 1.57449261107098347e1) * y
        num = (num + 8.88314979438837594e0) * y
        den = (den + 1.17693950891312499e2) * y
        num = (num + 6.61191906371416295e1) * y
        den = (den + 5.37181101862009858e2) * y
        num = (num + 2.98635138197400131e2) * y
        den = (den + 1.62138957456669019e3) * y
        num = (num + 8.81952221241769090e2) * y
        den = (den + 3.29079923573345963e3) * y
        num = (num + 1.71204761263407058e3) * y
        den = (den + 4.36261909014324716e3) * y
        num = (num + 2.05107837782607147e3) * y
        den = (den + 3.43936767414372164e3) * y
        result = (num + 1.23033935479799725e3) / (den + 1.23033935480374942e3)
        ysq = floor(y * 16.0) / 16.0
        dl = (y - ysq) * (y + ysq)
        result = exp(-ysq * ysq) * exp(-dl) * result
    else:
        if y >= 26.543:
            result = 0.0
        else:
            ysq = 1.0 / (y * y)
            num = 1.63153871373020978e-2 * ysq
            den = ysq
            num = (num + 3.05326634961232344e-1) * ysq
            den = (den + 2.56852019228982242e0) * ysq
            num = (num + 3.60344899949804439e-1) * ysq
            den = (den + 1.87295284992346047e0) * ysq
            num = (num + 1.25781726111229246e-1) * ysq
            den = (den + 5.27905102951428412e-1) * ysq
            num = (num + 1.60837851487422766e-2) * ysq
            den = (den + 6.05183413124413191e-2) * ysq
            result = ysq * (num + 6.58749161529837803e-4) / (den + 2.33520497626869185e-3)
            result = (5.6418958354775628695e-1 - result) / y
            ysq = floor(y * 16.0) / 16.0
            dl = (y - ysq) * (y + ysq)
            result = exp(-ysq * ysq) * exp(-dl) * result
    if x < 0.0:
        result = 2.0 - result
    return result


cdef double _norm_cdf(double x) noexcept nogil:
    return 0.5 * _erfc(-x * _INV_SQRT2)


cdef double _norm_ppf(double p) noexcept nogil:
    cdef double q = p - 0.5
    cdef double aq = q if q >= 0.0 else -q
    cdef double r, num, den, val
    if aq <= 0.425:
        r = 0.180625 - q * q
        num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
                    + 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r
                  + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r
                + 1.3314166789178437745e2) * r + 3.3871328727963666080e0)
        den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
                    + 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r
                  + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r
                + 4.2313330701600911252e1) * r + 1.0)
        return q * num / den
    r = p if q < 0.0 else 1.0 - p
    r = sqrt(-log(r))
    if r <= 5.0:
        r = r - 1.6
        num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
                    + 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r
                  + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r
                + 4.63033784615654529590e0) * r + 1.42343711074968357734e0)
        den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
                    + 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r
                  + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r
                + 2.05319162663775882187e0) * r + 1.0)
    else:
        r = r - 5.0
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                    + 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r
                  + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r
                + 5.46378491116411436990e0) * r + 6.65790464350110377720e0)
        den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
                    + 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r
                  + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r
                + 5.99832206555887937690e-1) * r + 1.0)
    val = num / den
    return -val if q < 0.0 else val


def erfc(double x):
    """Complementary error function, Cody's rational approximations."""
    return _erfc(x)


def norm_cdf(double x):
    """Standard normal CDF via Cody's erfc."""
    return _norm_cdf(x)


def norm_ppf(double p):
    """Standard normal quantile, Wichura's AS 241 (PPND16). p in (0, 1)."""
    return _norm_ppf(p)


# ---------------------------------------------------------------------------
# Counter-based random numbers
# ---------------------------------------------------------------------------

cdef uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9UL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBUL
    return z ^ (z >> 31)


cdef uint64_t _stream_key_c(uint64_t seed, uint64_t stream) noexcept nogil:
    return _mix64(seed + (stream + 1) * _GOLDEN)


cdef double _uniform_at_c(uint64_t key, uint64_t index) noexcept nogil:
    cdef uint64_t bits = _mix64(key + (index + 1) * _GOLDEN)
    return (<double>(bits >> 11) + 0.5) * _TWO_NEG53


def normal_at(seed, stream, index):
    """Standard normal draw ``index`` of substream ``stream`` under ``seed``."""
    return _norm_ppf(_uniform_at_c(_stream_key_c(<uint64_t>seed, <uint64_t>stream),
                                   <uint64_t>index))


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

def mean_stderr(values):
    """Sample mean and standard error with Kahan-compensated two-pass sums."""
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i
    cdef double total = 0.0, comp = 0.0, y, t, mean, ssq, d
    for i in range(n):
        y = v[i] - comp
        t = total + y
        comp = (t - total) - y
        total = t
    mean = total / n
    if n < 2:
        return mean, 0.0
    ssq = 0.0
    comp = 0.0
    for i in range(n):
        d = v[i] - mean
        y = d * d - comp
        t = ssq + y
        comp = (t - ssq) - y
        ssq = t
    return mean, sqrt(ssq / (n - 1) / n)


# ---------------------------------------------------------------------------
# Scalar Black-Scholes-Merton pieces
# ---------------------------------------------------------------------------

cdef double _bs_call_price(double s, double k, double r, double sigma,
                           double tau) noexcept nogil:
    cdef double srt, d1, d2
    if k == 0.0:
        return s
    srt = sigma * sqrt(tau)
    d1 = (log(s / k) + (r + 0.5 * sigma * sigma) * tau) / srt
    d2 = d1 - srt
    return s * _norm_cdf(d1) - k * exp(-r * tau) * _norm_cdf(d2)


cdef double _bs_call_delta(double s, double k, double r, double sigma,
                           double tau) noexcept nogil:
    cdef double srt, d1
    if k == 0.0:
        return 1.0
    srt = sigma * sqrt(tau)
    d1 = (log(s / k) + (r + 0.5 * sigma * sigma) * tau) / srt
    return _norm_cdf(d1)


def bs_call_price(double s, double k, double r, double sigma, double tau):
    """European call value; strike 0 degenerates to the spot itself."""
    return _bs_call_price(s, k, r, sigma, tau)


def bs_call_delta(double s, double k, double r, double sigma, double tau):
    """Call delta (CDF of d1); strike 0 means one share."""
    return _bs_call_delta(s, k, r, sigma, tau)


# ---------------------------------------------------------------------------
# Path simulation
# ---------------------------------------------------------------------------

cdef double _log_drift_c(int case, double alpha, double sigma) noexcept nogil:
    if case == 1:
        return alpha
    if case == 2:
        return alpha - 0.5 * sigma * sigma
    return -0.5 * sigma * sigma


def sim_exact(int case, double s0, double alpha, double sigma, double t,
              Py_ssize_t paths, seed):
    """Terminal prices from the exact lognormal law, one draw per path."""
    cdef double mu_t = _log_drift_c(case, alpha, sigma) * t
    cdef double vol = sigma * sqrt(t)
    cdef uint64_t sd = <uint64_t>seed
    out_arr = np.empty(paths, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t j
    cdef double z
    for j in range(paths):
        z = _norm_ppf(_uniform_at_c(_stream_key_c(sd, <uint64_t>j), 0))
        out[j] = s0 * exp(vol * z + mu_t)
    return out_arr


def sim_euler(int case, double s0, double alpha, double sigma, double t,
              Py_ssize_t steps, Py_ssize_t paths, seed):
    """Explicit Euler terminal prices; returns (terminals, negative-step count)."""
    cdef double dt = t / steps
    cdef double sqdt = sqrt(dt)
    cdef long negatives = 0
    cdef uint64_t sd = <uint64_t>seed
    out_arr = np.empty(paths, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t j, k
    cdef uint64_t key
    cdef double s, z, drift
    for j in range(paths):
        key = _stream_key_c(sd, <uint64_t>j)
        s = s0
        for k in range(steps):
            z = _norm_ppf(_uniform_at_c(key, <uint64_t>k))
            if case == 1:
                drift = (alpha + 0.5 * sigma * sigma) * s
            elif case == 2:
                drift = alpha * s
            else:
                drift = 0.0
            s = s + drift * dt + sigma * s * sqdt * z
            if s < 0.0:
                negatives += 1
        out[j] = s
    return out_arr, negatives


def hedge_errors(int case, double s0, double alpha, double sigma,
                 double strike, double rate, double maturity,
                 Py_ssize_t rebalances, Py_ssize_t paths, seed):
    """Terminal replication errors of a discretely rebalanced call hedge."""
    cdef double dt = maturity / rebalances
    cdef double sqdt = sqrt(dt)
    cdef double growth = exp(rate * dt)
    cdef double mu_dt = _log_drift_c(case, alpha, sigma) * dt
    cdef double x0 = _bs_call_price(s0, strike, rate, sigma, maturity)
    cdef uint64_t sd = <uint64_t>seed
    out_arr = np.empty(paths, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t j, k
    cdef uint64_t key
    cdef double s, x, tau, delta, bank, z, payoff
    for j in range(paths):
        key = _stream_key_c(sd, <uint64_t>j)
        s = s0
        x = x0
        for k in range(rebalances):
            tau = maturity - k * dt
            delta = _bs_call_delta(s, strike, rate, sigma, tau)
            bank = x - delta * s
            z = _norm_ppf(_uniform_at_c(key, <uint64_t>k))
            s = s * exp(sigma * sqdt * z + mu_dt)
            x = delta * s + bank * growth
        payoff = s - strike if s > strike else 0.0
        out[j] = x - payoff
    return out_arr


# ---------------------------------------------------------------------------
# Binomial lattice
# ---------------------------------------------------------------------------

def crr_price(double s0, double strike, double rate, double sigma,
              double maturity, Py_ssize_t steps, bint is_call):
    """Backward induction on the u = exp(sigma sqrt(dt)), d = 1/u lattice."""
    cdef double dt = maturity / steps
    cdef double srdt = sigma * sqrt(dt)
    cdef double u = exp(srdt)
    cdef double d = 1.0 / u
    cdef double growth = exp(rate * dt)
    cdef double disc = exp(-rate * dt)
    cdef double p = (growth - d) / (u - d)
    cdef double q = 1.0 - p
    buf = np.empty(steps + 1, dtype=np.float64)
    cdef double[::1] v = buf
    cdef Py_ssize_t j, n
    cdef double terminal
    for j in range(steps + 1):
        terminal = s0 * exp((2 * j - steps) * srdt)
        if is_call:
            v[j] = terminal - strike if terminal > strike else 0.0
        else:
            v[j] = strike - terminal if strike > terminal else 0.0
    for n in range(steps - 1, -1, -1):
        for j in range(n + 1):
            v[j] = disc * (p * v[j + 1] + q * v[j])
    return v[0]


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------

def fd_surface(double strike, double rate, double sigma, double maturity,
               double smax, Py_ssize_t m, Py_ssize_t n, bint implicit_all,
               bint is_call):
    """Theta-scheme solve of the pricing PDE; see the pure backend docs."""
    cdef double ds = smax / m
    cdef double dt = maturity / n
    values_arr = np.empty((n + 1, m + 1), dtype=np.float64)
    cdef double[:, ::1] values = values_arr
    cdef Py_ssize_t i, step
    cdef double s
    for i in range(m + 1):
        s = i * ds
        if is_call:
            values[n, i] = s - strike if s > strike else 0.0
        else:
            values[n, i] = strike - s if strike > s else 0.0
    work = np.zeros((9, m), dtype=np.float64)
    cdef double[::1] lo_c = work[0]
    cdef double[::1] mid_c = work[1]
    cdef double[::1] up_c = work[2]
    cdef double[::1] sub = work[3]
    cdef double[::1] diag = work[4]
    cdef double[::1] sup = work[5]
    cdef double[::1] rhs = work[6]
    cdef double[::1] cp = work[7]
    cdef double diff, conv, theta, t_cur, df, b0, bm, omt, tdt, piv
    for i in range(1, m):
        s = i * ds
        diff = 0.5 * sigma * sigma * s * s / (ds * ds)
        conv = 0.5 * rate * s / ds
        lo_c[i] = diff - conv
        mid_c[i] = -2.0 * diff - rate
        up_c[i] = diff + conv
    for step in range(n - 1, -1, -1):
        theta = 1.0 if (implicit_all or step == n - 1) else 0.5
        t_cur = step * dt
        df = exp(-rate * (maturity - t_cur))
        if is_call:
            b0 = 0.0
            bm = smax - strike * df
        else:
            b0 = strike * df
            bm = 0.0
        omt = (1.0 - theta) * dt
        tdt = theta * dt
        for i in range(1, m):
            rhs[i] = values[step + 1, i] + omt * (
                lo_c[i] * values[step + 1, i - 1]
                + mid_c[i] * values[step + 1, i]
                + up_c[i] * values[step + 1, i + 1])
            sub[i] = -tdt * lo_c[i]
            diag[i] = 1.0 - tdt * mid_c[i]
            sup[i] = -tdt * up_c[i]
        rhs[1] = rhs[1] + tdt * lo_c[1] * b0
        rhs[m - 1] = rhs[m - 1] + tdt * up_c[m - 1] * bm
        piv = diag[1]
        if -1e-300 < piv < 1e-300:
            return values_arr, 1
        cp[1] = sup[1] / piv
        rhs[1] = rhs[1] / piv
        for i in range(2, m):
            piv = diag[i] - sub[i] * cp[i - 1]
            if -1e-300 < piv < 1e-300:
                return values_arr, 1
            cp[i] = sup[i] / piv
            rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / piv
        values[step, m] = bm
        values[step, m - 1] = rhs[m - 1]
        for i in range(m - 2, 0, -1):
            values[step, i] = rhs[i] - cp[i] * values[step, i + 1]
        values[step, 0] = b0
    return values_arr, 0


# ---------------------------------------------------------------------------
# Adaptive quadrature
# ---------------------------------------------------------------------------

cdef double _payoff_density(double y, double s0, double strike, double mean,
                            double inv_sd, bint is_call) noexcept nogil:
    cdef double z = (y - mean) * inv_sd
    cdef double dens = exp(-0.5 * z * z) * _INV_SQRT_2PI * inv_sd
    if is_call:
        return (s0 * exp(y) - strike) * dens
    return (strike - s0 * exp(y)) * dens


def simpson_lognormal(double s0, double strike, double mean, double sd,
                      bint is_call, double tol, long max_panels):
    """Expected option payoff via adaptive Simpson; see the pure backend docs."""
    cdef double inv_sd = 1.0 / sd
    cdef double lo, hi
    if is_call:
        lo = log(strike / s0)
        hi = mean + 12.0 * sd
    else:
        lo = mean - 12.0 * sd
        hi = log(strike / s0)
    if hi <= lo:
        return 0.0, 0
    cdef double a_st[256]
    cdef double b_st[256]
    cdef double fa_st[256]
    cdef double fm_st[256]
    cdef double fb_st[256]
    cdef double s_st[256]
    cdef double eps_st[256]
    cdef double mid = 0.5 * (lo + hi)
    cdef double flo = _payoff_density(lo, s0, strike, mean, inv_sd, is_call)
    cdef double fmid = _payoff_density(mid, s0, strike, mean, inv_sd, is_call)
    cdef double fhi = _payoff_density(hi, s0, strike, mean, inv_sd, is_call)
    cdef double whole = (hi - lo) * (flo + 4.0 * fmid + fhi) / 6.0
    cdef int top = 1
    a_st[0] = lo; b_st[0] = hi
    fa_st[0] = flo; fm_st[0] = fmid; fb_st[0] = fhi
    s_st[0] = whole; eps_st[0] = tol
    cdef double total = 0.0, comp = 0.0
    cdef long panels = 1
    cdef double a, b, fa, fm, fb, s, eps, lm, rm, flm, frm, sl, sr
    cdef double err, aerr, leaf, y, t, half
    while top > 0:
        top -= 1
        a = a_st[top]; b = b_st[top]
        fa = fa_st[top]; fm = fm_st[top]; fb = fb_st[top]
        s = s_st[top]; eps = eps_st[top]
        mid = 0.5 * (a + b)
        lm = 0.5 * (a + mid)
        rm = 0.5 * (mid + b)
        flm = _payoff_density(lm, s0, strike, mean, inv_sd, is_call)
        frm = _payoff_density(rm, s0, strike, mean, inv_sd, is_call)
        sl = (mid - a) * (fa + 4.0 * flm + fm) / 6.0
        sr = (b - mid) * (fm + 4.0 * frm + fb) / 6.0
        err = sl + sr - s
        aerr = err if err >= 0.0 else -err
        if aerr <= 15.0 * eps or lm <= a or rm >= b or top > 253:
            leaf = sl + sr + err / 15.0
            y = leaf - comp
            t = total + y
            comp = (t - total) - y
            total = t
        else:
            if panels >= max_panels:
                return total, 1
            panels += 1
            half = 0.5 * eps
            a_st[top] = mid; b_st[top] = b
            fa_st[top] = fm; fm_st[top] = frm; fb_st[top] = fb
            s_st[top] = sr; eps_st[top] = half
            top += 1
            a_st[top] = a; b_st[top] = mid
            fa_st[top] = fa; fm_st[top] = flm; fb_st[top] = fm
            s_st[top] = sl; eps_st[top] = half
            top += 1
    return total, 0
