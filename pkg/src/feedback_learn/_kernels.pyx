# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled numeric kernels.

Twin of ``_kernels_py``: same names, same signatures, same floating-point
operation order per output element, so the two backends are bitwise
interchangeable. Buffers are flat row-major array('d') / array('q') /
bytes; the module is compiled with -ffp-contract=off to forbid FMA fusion.
"""

from libc.math cimport tanh, exp, floor, isfinite

IMPLEMENTATION = "compiled"


# ---------------------------------------------------------------------------
# matrix products

def matmul_nn(const double[::1] a, const double[::1] b, double[::1] out,
              Py_ssize_t n, Py_ssize_t m, Py_ssize_t p):
    """out (n x p) = a (n x m) . b (m x p); out must be zeroed."""
    cdef Py_ssize_t i, j, k
    cdef double aik
    for i in range(n):
        for k in range(m):
            aik = a[i * m + k]
            for j in range(p):
                out[i * p + j] += aik * b[k * p + j]


def matmul_tn(const double[::1] a, const double[::1] b, double[::1] out,
              Py_ssize_t n, Py_ssize_t m, Py_ssize_t p):
    """out (m x p) = transpose(a (n x m)) . b (n x p); out must be zeroed."""
    cdef Py_ssize_t i, j, k
    cdef double aki
    for k in range(n):
        for i in range(m):
            aki = a[k * m + i]
            for j in range(p):
                out[i * p + j] += aki * b[k * p + j]


def matmul_nt(const double[::1] a, const double[::1] b, double[::1] out,
              Py_ssize_t n, Py_ssize_t m, Py_ssize_t p):
    """out (n x p) = a (n x m) . transpose(b (p x m))."""
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in range(n):
        for j in range(p):
            acc = 0.0
            for k in range(m):
                acc += a[i * m + k] * b[j * m + k]
            out[i * p + j] = acc


# ---------------------------------------------------------------------------
# elementwise maps

def sgn_fill(const double[::1] a, double[::1] out, Py_ssize_t size):
    cdef Py_ssize_t i
    for i in range(size):
        out[i] = 1.0 if a[i] >= 0.0 else -1.0


def sign3_fill(const double[::1] a, double[::1] out, Py_ssize_t size):
    cdef Py_ssize_t i
    cdef double x
    for i in range(size):
        x = a[i]
        if x > 0.0:
            out[i] = 1.0
        elif x < 0.0:
            out[i] = -1.0
        else:
            out[i] = 0.0


def odd_power(const double[::1] a, double[::1] out, Py_ssize_t size, Py_ssize_t n):
    cdef Py_ssize_t i, r
    cdef double x, acc
    for i in range(size):
        x = a[i]
        acc = x
        for r in range(n - 1):
            acc *= x
        out[i] = acc


def tanh_fill(const double[::1] a, double[::1] out, Py_ssize_t size):
    cdef Py_ssize_t i
    for i in range(size):
        out[i] = tanh(a[i])


def leaky_relu_fill(const double[::1] a, double[::1] out, Py_ssize_t size, double slope):
    cdef Py_ssize_t i
    cdef double x
    for i in range(size):
        x = a[i]
        out[i] = x if x >= 0.0 else x * slope


def staircase_fill(const double[::1] a, double[::1] out, Py_ssize_t size,
                   double width, double height):
    cdef Py_ssize_t i
    for i in range(size):
        out[i] = height * floor(a[i] / width)


def softmax_columns(const double[::1] a, double[::1] out,
                    Py_ssize_t rows, Py_ssize_t cols):
    cdef Py_ssize_t i, j
    cdef double hi, v, e, total
    for j in range(cols):
        hi = a[j]
        for i in range(1, rows):
            v = a[i * cols + j]
            if v > hi:
                hi = v
        total = 0.0
        for i in range(rows):
            e = exp(a[i * cols + j] - hi)
            out[i * cols + j] = e
            total += e
        for i in range(rows):
            out[i * cols + j] = out[i * cols + j] / total


def tanh_gain_from_output(const double[::1] y, double[::1] out, Py_ssize_t size):
    cdef Py_ssize_t i
    cdef double v
    for i in range(size):
        v = y[i]
        out[i] = 1.0 - v * v


def leaky_gain_from_output(const double[::1] y, double[::1] out, Py_ssize_t size,
                           double slope):
    cdef Py_ssize_t i
    for i in range(size):
        out[i] = slope if y[i] < 0.0 else 1.0


def softmax_gain_from_output(const double[::1] y, double[::1] out, Py_ssize_t size):
    cdef Py_ssize_t i
    cdef double v
    for i in range(size):
        v = y[i]
        out[i] = v * (1.0 - v)


def subtract(const double[::1] a, const double[::1] b, double[::1] out, Py_ssize_t size):
    cdef Py_ssize_t i
    for i in range(size):
        out[i] = a[i] - b[i]


def hadamard(const double[::1] a, const double[::1] b, double[::1] out, Py_ssize_t size):
    cdef Py_ssize_t i
    for i in range(size):
        out[i] = a[i] * b[i]


def scale_fill(const double[::1] a, double[::1] out, Py_ssize_t size, double factor):
    cdef Py_ssize_t i
    for i in range(size):
        out[i] = a[i] * factor


# ---------------------------------------------------------------------------
# training updates

def relax_update(double[::1] w, const double[::1] e, Py_ssize_t size,
                 double gain, double rate):
    """w += (gain*e - w) * rate, in place. Returns 1 if w stayed finite."""
    cdef Py_ssize_t i
    cdef double v
    cdef int ok = 1
    for i in range(size):
        v = w[i] + (gain * e[i] - w[i]) * rate
        w[i] = v
        if not isfinite(v):
            ok = 0
    return ok


def relax_update_per_weight(double[::1] w, const double[::1] e,
                            const double[::1] rates, Py_ssize_t size, double gain):
    cdef Py_ssize_t i
    cdef double v
    cdef int ok = 1
    for i in range(size):
        v = w[i] + (gain * e[i] - w[i]) * rates[i]
        w[i] = v
        if not isfinite(v):
            ok = 0
    return ok


def rprop_rates(const double[::1] prev_sign, const double[::1] curr_sign,
                const double[::1] rates, double[::1] out, Py_ssize_t size,
                double eta_plus, double eta_minus, double rate_min, double rate_max):
    cdef Py_ssize_t i
    cdef double prod, r
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


def all_finite(const double[::1] a, Py_ssize_t size):
    cdef Py_ssize_t i
    for i in range(size):
        if not isfinite(a[i]):
            return 0
    return 1


# ---------------------------------------------------------------------------
# dataset helpers

def gather_columns(const double[::1] src, Py_ssize_t rows, Py_ssize_t cols,
                   const long long[::1] idx, double[::1] out, Py_ssize_t k):
    cdef Py_ssize_t i, j, base
    for i in range(rows):
        base = i * cols
        for j in range(k):
            out[i * k + j] = src[base + idx[j]]


def argmax_columns(const double[::1] a, Py_ssize_t rows, Py_ssize_t cols,
                   long long[::1] out_idx):
    cdef Py_ssize_t i, j, arg
    cdef double best, v
    for j in range(cols):
        best = a[j]
        arg = 0
        for i in range(1, rows):
            v = a[i * cols + j]
            if v > best:
                best = v
                arg = i
        out_idx[j] = arg


def count_label_matches(const double[::1] a, Py_ssize_t rows, Py_ssize_t cols,
                        const long long[::1] labels):
    cdef Py_ssize_t i, j, arg
    cdef double best, v
    cdef long long hits = 0
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


def mean_sq_diff(const double[::1] a, const double[::1] b, Py_ssize_t size):
    cdef Py_ssize_t i
    cdef double d, acc = 0.0
    for i in range(size):
        d = a[i] - b[i]
        acc += d * d
    return acc / size


def row_means(const double[::1] a, Py_ssize_t rows, Py_ssize_t cols, double[::1] out):
    cdef Py_ssize_t i, j, base
    cdef double acc
    for i in range(rows):
        acc = 0.0
        base = i * cols
        for j in range(cols):
            acc += a[base + j]
        out[i] = acc / cols


def center_rows(const double[::1] a, Py_ssize_t rows, Py_ssize_t cols,
                const double[::1] means, double[::1] out):
    cdef Py_ssize_t i, j, base
    cdef double mu
    for i in range(rows):
        base = i * cols
        mu = means[i]
        for j in range(cols):
            out[base + j] = a[base + j] - mu


def pixels_to_features(const unsigned char[::1] payload, Py_ssize_t n_pixels,
                       Py_ssize_t count, double[::1] out):
    cdef Py_ssize_t k, p, base
    for k in range(count):
        base = k * n_pixels
        for p in range(n_pixels):
            out[p * count + k] = payload[base + p] / 255.0
