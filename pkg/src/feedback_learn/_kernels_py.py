"""Pure-Python numeric kernels.

Fallback backend used when the compiled extension is unavailable. Every
function here has a twin in ``_kernels.pyx`` with the same name, signature,
and, crucially, the same floating-point operation order, so results are
bitwise identical across backends. All buffers are flat row-major
``array('d')`` (or ``array('q')`` for indices/labels); shapes are passed
alongside.

Keep loops dumb and in ascending index order; cleverness here breaks the
bitwise-equality contract with the compiled twin.
"""

import math

IMPLEMENTATION = "python"


# ---------------------------------------------------------------------------
# matrix products

def matmul_nn(a, b, out, n, m, p):
    """out (n x p) = a (n x m) . b (m x p); out must be zeroed."""
    for i in range(n):
        for j in range(p):
            acc = 0.0
            for k in range(m):
                acc += a[i * m + k] * b[k * p + j]
            out[i * p + j] = acc


def matmul_tn(a, b, out, n, m, p):
    """out (m x p) = transpose(a (n x m)) . b (n x p)."""
    for i in range(m):
        for j in range(p):
            acc = 0.0
            for k in range(n):
                acc += a[k * m + i] * b[k * p + j]
            out[i * p + j] = acc


def matmul_nt(a, b, out, n, m, p):
    """out (n x p) = a (n x m) . transpose(b (p x m))."""
    for i in range(n):
        for j in range(p):
            acc = 0.0
            for k in range(m):
                acc += a[i * m + k] * b[j * m + k]
            out[i * p + j] = acc


# ---------------------------------------------------------------------------
# elementwise maps

def sgn_fill(a, out, size):
    """Two-valued sign: +1 for x >= 0 (including -0.0), -1 for x < 0."""
    for i in range(size):
        out[i] = 1.0 if a[i] >= 0.0 else -1.0


def sign3_fill(a, out, size):
    """Three-valued sign in {-1, 0, +1}; exact zero maps to 0."""
    for i in range(size):
        x = a[i]
        if x > 0.0:
            out[i] = 1.0
        elif x < 0.0:
            out[i] = -1.0
        else:
            out[i] = 0.0


def odd_power(a, out, size, n):
    for i in range(size):
        x = a[i]
        acc = x
        for _ in range(n - 1):
            acc *= x
        out[i] = acc


def tanh_fill(a, out, size):
    for i in range(size):
        out[i] = math.tanh(a[i])


def leaky_relu_fill(a, out, size, slope):
    for i in range(size):
        x = a[i]
        out[i] = x if x >= 0.0 else x * slope


def staircase_fill(a, out, size, width, height):
    for i in range(size):
        out[i] = height * math.floor(a[i] / width)


def softmax_columns(a, out, rows, cols):
    """Column-wise softmax with max subtraction; each output column sums to 1."""
    for j in range(cols):
        hi = a[j]
        for i in range(1, rows):
            v = a[i * cols + j]
            if v > hi:
                hi = v
        total = 0.0
        for i in range(rows):
            e = math.exp(a[i * cols + j] - hi)
            out[i * cols + j] = e
            total += e
        for i in range(rows):
            out[i * cols + j] = out[i * cols + j] / total


def tanh_gain_from_output(y, out, size):
    for i in range(size):
        v = y[i]
        out[i] = 1.0 - v * v


def leaky_gain_from_output(y, out, size, slope):
    for i in range(size):
        out[i] = slope if y[i] < 0.0 else 1.0


def softmax_gain_from_output(y, out, size):
    for i in range(size):
        v = y[i]
        out[i] = v * (1.0 - v)


def subtract(a, b, out, size):
    for i in range(size):
        out[i] = a[i] - b[i]


def hadamard(a, b, out, size):
    for i in range(size):
        out[i] = a[i] * b[i]


def scale_fill(a, out, size, factor):
    for i in range(size):
        out[i] = a[i] * factor


# ---------------------------------------------------------------------------
# training updates

def relax_update(w, e, size, gain, rate):
    """w += (gain*e - w) * rate, in place. Returns 1 if w stayed finite."""
    ok = 1
    for i in range(size):
        v = w[i] + (gain * e[i] - w[i]) * rate
        w[i] = v
        if not math.isfinite(v):
            ok = 0
    return ok


def relax_update_per_weight(w, e, rates, size, gain):
    """w += (gain*e - w) * rates, entrywise in place. Returns finite flag."""
    ok = 1
    for i in range(size):
        v = w[i] + (gain * e[i] - w[i]) * rates[i]
        w[i] = v
        if not math.isfinite(v):
            ok = 0
    return ok


def rprop_rates(prev_sign, curr_sign, rates, out, size,
                eta_plus, eta_minus, rate_min, rate_max):
    """Per-weight rate adaptation keyed on consecutive error signs.

    Agreeing nonzero signs grow the rate by eta_plus, opposing signs shrink
    it by eta_minus, a zero on either side leaves it alone; the result is
    clamped to [rate_min, rate_max].
    """
    for i in range(size):
        prod = prev_sign[i] * curr_sign[i]
        r = rates[i]
        if prod > 0.0:
            r *= eta_plus
        elif prod < 0.0:
            r *= eta_minus
        if r < rate_min:
            r = rate_min
        elif r > rate_max:
            r = rate_max
        out[i] = r


def all_finite(a, size):
    for i in range(size):
        if not math.isfinite(a[i]):
            return 0
    return 1


# ---------------------------------------------------------------------------
# dataset helpers

def gather_columns(src, rows, cols, idx, out, k):
    """out (rows x k) = src columns selected by idx (array('q') of length k)."""
    for i in range(rows):
        base = i * cols
        for j in range(k):
            out[i * k + j] = src[base + idx[j]]


def argmax_columns(a, rows, cols, out_idx):
    """First index of the per-column maximum, into out_idx (array('q'))."""
    for j in range(cols):
        best = a[j]
        arg = 0
        for i in range(1, rows):
            v = a[i * cols + j]
            if v > best:
                best = v
                arg = i
        out_idx[j] = arg


def count_label_matches(a, rows, cols, labels):
    """Number of columns whose argmax equals the corresponding label."""
    hits = 0
    for j in range(cols):
        best = a[j]
        arg = 0
        for i in range(1, rows):
            v = a[i * cols + j]
            if v > best:
                best = v
                arg = i
        if arg == labels[j]:
            hits += 1
    return hits


def mean_sq_diff(a, b, size):
    acc = 0.0
    for i in range(size):
        d = a[i] - b[i]
        acc += d * d
    return acc / size


def row_means(a, rows, cols, out):
    for i in range(rows):
        acc = 0.0
        base = i * cols
        for j in range(cols):
            acc += a[base + j]
        out[i] = acc / cols


def center_rows(a, rows, cols, means, out):
    for i in range(rows):
        base = i * cols
        mu = means[i]
        for j in range(cols):
            out[base + j] = a[base + j] - mu


def pixels_to_features(payload, n_pixels, count, out):
    """Transpose sample-major bytes into a feature-major [0,1] matrix."""
    for k in range(count):
        base = k * n_pixels
        for p in range(n_pixels):
            out[p * count + k] = payload[base + p] / 255.0
