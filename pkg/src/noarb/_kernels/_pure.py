"""Pure-Python kernel backend.

Reference implementation of the numerical hot loops. The compiled backend
(``_core.pyx``) mirrors this file operation for operation with C doubles and
the same libm calls, so the two backends return bit-identical results; any
edit here must be replayed there.

Algorithm notes
---------------
* ``norm_cdf`` evaluates erf/erfc with W. J. Cody's rational Chebyshev
  approximations (Math. Comp. 23, 1969; the CALERF coefficient set).
  Absolute error is below 1e-15 in double precision, well inside the
  1e-10 contract advertised by :mod:`noarb.bsm`.
* ``norm_ppf`` is Wichura's algorithm AS 241, PPND16 variant (Applied
  Statistics 37, 1988), relative error about 1e-16.
* The random stream is nested SplitMix64 (Steele, Lea & Flood, OOPSLA
  2014): substream ``j`` under ``seed`` is keyed by output ``j + 1`` of
  the master SplitMix64 sequence, and draw ``i`` of a substream is output
  ``i + 1`` of the key's own sequence. Every draw is O(1) random access,
  so simulation results cannot depend on evaluation order or worker
  count. Raw 64-bit words map to uniforms in the open interval (0, 1) as
  ``((bits >> 11) + 0.5) * 2**-53`` and to normals through ``norm_ppf``.

Kernels signal failure through status codes instead of exceptions; the
calling module translates them into the package's exception types.
"""

import math

import numpy as np

BACKEND = "pure"

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15

_INV_SQRT2 = 0.7071067811865476  # 1/sqrt(2)
_INV_SQRT_2PI = 0.3989422804014327  # 1/sqrt(2*pi)
_TWO_NEG53 = 1.1102230246251565e-16  # 2**-53


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

def erfc(x):
    """Complementary error function, Cody's rational approximations."""
    y = x if x >= 0.0 else -x
    if y <= 0.46875:
        # Central region: rational approximation of erf itself.
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
        # exp(-y*y) split into an exactly representable part plus remainder
        # to avoid the cancellation Cody warns about.
        ysq = math.floor(y * 16.0) / 16.0
        dl = (y - ysq) * (y + ysq)
        result = math.exp(-ysq * ysq) * math.exp(-dl) * result
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
            ysq = math.floor(y * 16.0) / 16.0
            dl = (y - ysq) * (y + ysq)
            result = math.exp(-ysq * ysq) * math.exp(-dl) * result
    if x < 0.0:
        result = 2.0 - result
    return result


def norm_cdf(x):
    """Standard normal CDF via Cody's erfc."""
    return 0.5 * erfc(-x * _INV_SQRT2)


def norm_ppf(p):
    """Standard normal quantile, Wichura's AS 241 (PPND16). p in (0, 1)."""
    q = p - 0.5
    aq = q if q >= 0.0 else -q
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
    r = math.sqrt(-math.log(r))
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


# ---------------------------------------------------------------------------
# Counter-based random numbers
# ---------------------------------------------------------------------------

def _mix64(z):
    """SplitMix64 output function (finalizer)."""
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def _stream_key(seed, stream):
    """Key of substream ``stream``: master-sequence output ``stream + 1``."""
    return _mix64((seed + (stream + 1) * _GOLDEN) & _MASK64)


def _uniform_at(key, index):
    """Draw ``index`` of a keyed substream, uniform on the open (0, 1)."""
    bits = _mix64((key + (index + 1) * _GOLDEN) & _MASK64)
    return (float(bits >> 11) + 0.5) * _TWO_NEG53


def normal_at(seed, stream, index):
    """Standard normal draw ``index`` of substream ``stream`` under ``seed``."""
    return norm_ppf(_uniform_at(_stream_key(seed, stream), index))


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

def mean_stderr(values):
    """Sample mean and standard error with Kahan-compensated two-pass sums."""
    n = len(values)
    total = 0.0
    comp = 0.0
    for v in values:
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    mean = total / n
    if n < 2:
        return mean, 0.0
    ssq = 0.0
    comp = 0.0
    for v in values:
        d = v - mean
        y = d * d - comp
        t = ssq + y
        comp = (t - ssq) - y
        ssq = t
    stderr = math.sqrt(ssq / (n - 1) / n)
    return mean, stderr


# ---------------------------------------------------------------------------
# Scalar Black-Scholes-Merton pieces (needed inside the hedge loop)
# ---------------------------------------------------------------------------

def bs_call_price(s, k, r, sigma, tau):
    """European call value; strike 0 degenerates to the spot itself."""
    if k == 0.0:
        return s
    srt = sigma * math.sqrt(tau)
    d1 = (math.log(s / k) + (r + 0.5 * sigma * sigma) * tau) / srt
    d2 = d1 - srt
    return s * norm_cdf(d1) - k * math.exp(-r * tau) * norm_cdf(d2)


def bs_call_delta(s, k, r, sigma, tau):
    """Call delta (CDF of d1); strike 0 means one share."""
    if k == 0.0:
        return 1.0
    srt = sigma * math.sqrt(tau)
    d1 = (math.log(s / k) + (r + 0.5 * sigma * sigma) * tau) / srt
    return norm_cdf(d1)


# ---------------------------------------------------------------------------
# Path simulation
# ---------------------------------------------------------------------------
# ``case`` selects the log-drift convention:
#   1 -> exponent drift alpha per unit time
#   2 -> exponent drift alpha - sigma^2/2 (mean growth rate alpha)
#   3 -> exponent drift -sigma^2/2 (driftless martingale; alpha unused)

def _log_drift(case, alpha, sigma):
    if case == 1:
        return alpha
    if case == 2:
        return alpha - 0.5 * sigma * sigma
    return -0.5 * sigma * sigma


def sim_exact(case, s0, alpha, sigma, t, paths, seed):
    """Terminal prices from the exact lognormal law, one draw per path."""
    mu_t = _log_drift(case, alpha, sigma) * t
    vol = sigma * math.sqrt(t)
    out = np.empty(paths, dtype=np.float64)
    for j in range(paths):
        z = norm_ppf(_uniform_at(_stream_key(seed, j), 0))
        out[j] = s0 * math.exp(vol * z + mu_t)
    return out


def sim_euler(case, s0, alpha, sigma, t, steps, paths, seed):
    """Explicit Euler terminal prices; returns (terminals, negative-step count).

    Steps that land below zero are counted, not clamped: the scheme's
    pathology is part of the reported result.
    """
    dt = t / steps
    sqdt = math.sqrt(dt)
    negatives = 0
    out = np.empty(paths, dtype=np.float64)
    for j in range(paths):
        key = _stream_key(seed, j)
        s = s0
        for k in range(steps):
            z = norm_ppf(_uniform_at(key, k))
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
    return out, negatives


def hedge_errors(case, s0, alpha, sigma, strike, rate, maturity,
                 rebalances, paths, seed):
    """Terminal replication errors of a discretely rebalanced call hedge.

    Each path holds the closed-form delta between rebalance dates and
    accrues the cash account at ``rate``; the underlying moves by exact
    lognormal increments. Returns portfolio-minus-payoff per path.
    """
    dt = maturity / rebalances
    sqdt = math.sqrt(dt)
    growth = math.exp(rate * dt)
    mu_dt = _log_drift(case, alpha, sigma) * dt
    x0 = bs_call_price(s0, strike, rate, sigma, maturity)
    out = np.empty(paths, dtype=np.float64)
    for j in range(paths):
        key = _stream_key(seed, j)
        s = s0
        x = x0
        for k in range(rebalances):
            tau = maturity - k * dt
            delta = bs_call_delta(s, strike, rate, sigma, tau)
            bank = x - delta * s
            z = norm_ppf(_uniform_at(key, k))
            s = s * math.exp(sigma * sqdt * z + mu_dt)
            x = delta * s + bank * growth
        payoff = s - strike if s > strike else 0.0
        out[j] = x - payoff
    return out


# ---------------------------------------------------------------------------
# Binomial lattice
# ---------------------------------------------------------------------------

def crr_price(s0, strike, rate, sigma, maturity, steps, is_call):
    """Backward induction on the u = exp(sigma sqrt(dt)), d = 1/u lattice.

    Per-step viability (d < e^{r dt} < u) is the caller's responsibility.
    """
    dt = maturity / steps
    srdt = sigma * math.sqrt(dt)
    u = math.exp(srdt)
    d = 1.0 / u
    growth = math.exp(rate * dt)
    disc = math.exp(-rate * dt)
    p = (growth - d) / (u - d)
    q = 1.0 - p
    v = [0.0] * (steps + 1)
    for j in range(steps + 1):
        terminal = s0 * math.exp((2 * j - steps) * srdt)
        if is_call:
            v[j] = terminal - strike if terminal > strike else 0.0
        else:
            v[j] = strike - terminal if terminal < strike else 0.0
    for n in range(steps - 1, -1, -1):
        for j in range(n + 1):
            v[j] = disc * (p * v[j + 1] + q * v[j])
    return v[0]


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------

def fd_surface(strike, rate, sigma, maturity, smax, m, n, implicit_all, is_call):
    """Theta-scheme solve of the pricing PDE on a uniform grid.

    Crank-Nicolson with one fully implicit startup step unless
    ``implicit_all`` forces backward Euler throughout. Returns
    ``(values, status)`` where values has shape (n+1, m+1), row i holding
    calendar time i*dt, and status 1 flags a singular tridiagonal pivot.
    """
    ds = smax / m
    dt = maturity / n
    values = np.empty((n + 1, m + 1), dtype=np.float64)
    for i in range(m + 1):
        s = i * ds
        if is_call:
            values[n, i] = s - strike if s > strike else 0.0
        else:
            values[n, i] = strike - s if strike > s else 0.0
    # Spatial operator L v = 0.5 sigma^2 S^2 v_ss + r S v_s - r v at
    # interior node i: lo_c[i] v_{i-1} + mid_c[i] v_i + up_c[i] v_{i+1}.
    lo_c = [0.0] * m
    mid_c = [0.0] * m
    up_c = [0.0] * m
    for i in range(1, m):
        s = i * ds
        diff = 0.5 * sigma * sigma * s * s / (ds * ds)
        conv = 0.5 * rate * s / ds
        lo_c[i] = diff - conv
        mid_c[i] = -2.0 * diff - rate
        up_c[i] = diff + conv
    sub = [0.0] * m
    diag = [0.0] * m
    sup = [0.0] * m
    rhs = [0.0] * m
    cp = [0.0] * m
    for step in range(n - 1, -1, -1):
        theta = 1.0 if (implicit_all or step == n - 1) else 0.5
        t_cur = step * dt
        df = math.exp(-rate * (maturity - t_cur))
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
        # Thomas sweep over interior nodes 1..m-1.
        piv = diag[1]
        if -1e-300 < piv < 1e-300:
            return values, 1
        cp[1] = sup[1] / piv
        rhs[1] = rhs[1] / piv
        for i in range(2, m):
            piv = diag[i] - sub[i] * cp[i - 1]
            if -1e-300 < piv < 1e-300:
                return values, 1
            cp[i] = sup[i] / piv
            rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / piv
        values[step, m] = bm
        values[step, m - 1] = rhs[m - 1]
        for i in range(m - 2, 0, -1):
            values[step, i] = rhs[i] - cp[i] * values[step, i + 1]
        values[step, 0] = b0
    return values, 0


# ---------------------------------------------------------------------------
# Adaptive quadrature
# ---------------------------------------------------------------------------

def _payoff_density(y, s0, strike, mean, inv_sd, is_call):
    z = (y - mean) * inv_sd
    dens = math.exp(-0.5 * z * z) * _INV_SQRT_2PI * inv_sd
    if is_call:
        return (s0 * math.exp(y) - strike) * dens
    return (strike - s0 * math.exp(y)) * dens


def simpson_lognormal(s0, strike, mean, sd, is_call, tol, max_panels):
    """Expected option payoff under a normal log-price via adaptive Simpson.

    Integrates (s0 e^y - K)^+ (call) or (K - s0 e^y)^+ (put) against the
    Normal(mean, sd^2) density of y = log-price ratio. The non-intrinsic
    tail is truncated 12 standard deviations out, below 1e-12 relative
    mass. Returns ``(value, status)``; status 1 means the panel cap was
    hit before the tolerance, leaving the value unreliable.

    Classic Simpson halving with the |S_left+S_right-S| <= 15 eps accept
    test and Richardson end correction, run on an explicit stack with the
    left half first so the accumulation order is reproducible.
    """
    inv_sd = 1.0 / sd
    if is_call:
        lo = math.log(strike / s0)
        hi = mean + 12.0 * sd
    else:
        lo = mean - 12.0 * sd
        hi = math.log(strike / s0)
    if hi <= lo:
        return 0.0, 0
    mid = 0.5 * (lo + hi)
    flo = _payoff_density(lo, s0, strike, mean, inv_sd, is_call)
    fmid = _payoff_density(mid, s0, strike, mean, inv_sd, is_call)
    fhi = _payoff_density(hi, s0, strike, mean, inv_sd, is_call)
    whole = (hi - lo) * (flo + 4.0 * fmid + fhi) / 6.0
    stack = [(lo, hi, flo, fmid, fhi, whole, tol)]
    total = 0.0
    comp = 0.0
    panels = 1
    while stack:
        a, b, fa, fm, fb, s, eps = stack.pop()
        mid = 0.5 * (a + b)
        lm = 0.5 * (a + mid)
        rm = 0.5 * (mid + b)
        flm = _payoff_density(lm, s0, strike, mean, inv_sd, is_call)
        frm = _payoff_density(rm, s0, strike, mean, inv_sd, is_call)
        sl = (mid - a) * (fa + 4.0 * flm + fm) / 6.0
        sr = (b - mid) * (fm + 4.0 * frm + fb) / 6.0
        err = sl + sr - s
        aerr = err if err >= 0.0 else -err
        if aerr <= 15.0 * eps or lm <= a or rm >= b or len(stack) > 253:
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
            stack.append((mid, b, fm, frm, fb, sr, half))
            stack.append((a, mid, fa, flm, fm, sl, half))
    return total, 0
