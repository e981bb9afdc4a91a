# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled backend: stack-program evaluation over plain/dual/second-order
numbers plus RK4 flow kernels.

Mirrors cantrans._pure operation for operation; values and first
derivatives are computed with the same floating-point operation order so
the two backends agree bitwise (the extension is built with FMA
contraction disabled).
"""

from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memset
from libc.math cimport sin, cos, exp, log, sqrt, tan, fabs, floor, isfinite

from .errors import DomainError, NonFinite

name = "compiled"

cdef enum:
    OP_CONST = 0
    OP_VAR = 1
    OP_ADD = 2
    OP_SUB = 3
    OP_MUL = 4
    OP_DIV = 5
    OP_NEG = 6
    OP_POW = 7
    OP_SIN = 8
    OP_COS = 9
    OP_EXP = 10
    OP_LN = 11
    OP_SQRT = 12
    OP_TAN = 13
    OP_ABS = 14
    OP_POWI = 15

cdef enum:
    ERR_DIV0 = 1
    ERR_LN = 2
    ERR_SQRT = 3
    ERR_POW = 4
    ERR_SQRT0 = 5
    ERR_BADOP = 6
    ERR_NONFINITE = 7
    ERR_STACK = 8


cdef inline void _zero_cell(double* dst, int cell) nogil:
    memset(dst, 0, cell * sizeof(double))


cdef inline void _unary(double* dst, const double* a, double f0, double d1,
                        double d2, int k, int order) nogil:
    cdef int i, j
    dst[0] = f0
    if order >= 1:
        for i in range(k):
            dst[1 + i] = d1 * a[1 + i]
    if order >= 2:
        for i in range(k):
            for j in range(k):
                dst[1 + k + i * k + j] = (d1 * a[1 + k + i * k + j]
                                          + d2 * a[1 + i] * a[1 + j])


cdef inline void _add(double* dst, const double* a, const double* b,
                      int k, int order) nogil:
    cdef int i, m = 1
    if order >= 1:
        m += k
    if order >= 2:
        m += k * k
    for i in range(m):
        dst[i] = a[i] + b[i]


cdef inline void _sub(double* dst, const double* a, const double* b,
                      int k, int order) nogil:
    cdef int i, m = 1
    if order >= 1:
        m += k
    if order >= 2:
        m += k * k
    for i in range(m):
        dst[i] = a[i] - b[i]


cdef inline void _negate(double* dst, const double* a, int k, int order) nogil:
    cdef int i, m = 1
    if order >= 1:
        m += k
    if order >= 2:
        m += k * k
    for i in range(m):
        dst[i] = -a[i]


cdef inline void _mul(double* dst, const double* a, const double* b,
                      int k, int order) nogil:
    cdef int i, j
    cdef double av = a[0], bv = b[0]
    dst[0] = av * bv
    if order >= 1:
        for i in range(k):
            dst[1 + i] = a[1 + i] * bv + av * b[1 + i]
    if order >= 2:
        for i in range(k):
            for j in range(k):
                dst[1 + k + i * k + j] = (a[1 + k + i * k + j] * bv
                                          + a[1 + i] * b[1 + j]
                                          + b[1 + i] * a[1 + j]
                                          + av * b[1 + k + i * k + j])


cdef inline int _div(double* dst, const double* a, const double* b,
                     int k, int order) nogil:
    cdef int i, j
    cdef double av = a[0], bv = b[0], den, w
    if bv == 0.0:
        return ERR_DIV0
    w = av / bv
    dst[0] = w
    if order >= 1:
        den = bv * bv
        for i in range(k):
            dst[1 + i] = (a[1 + i] * bv - av * b[1 + i]) / den
    if order >= 2:
        for i in range(k):
            for j in range(k):
                dst[1 + k + i * k + j] = (a[1 + k + i * k + j]
                                          - dst[1 + i] * b[1 + j]
                                          - dst[1 + j] * b[1 + i]
                                          - w * b[1 + k + i * k + j]) / bv
    return 0


cdef inline void _copy_cell(double* dst, const double* src, int cell) nogil:
    memcpy(dst, src, cell * sizeof(double))


cdef int _powi(double* dst, const double* a, long m, int k, int order,
               int cell, double* s1, double* s2) nogil:
    cdef long r, cnt
    if m == 0:
        _zero_cell(dst, cell)
        dst[0] = 1.0
        return 0
    cnt = m if m > 0 else -m
    _copy_cell(dst, a, cell)
    for r in range(cnt - 1):
        _mul(s1, dst, a, k, order)
        _copy_cell(dst, s1, cell)
    if m < 0:
        _zero_cell(s2, cell)
        s2[0] = 1.0
        _copy_cell(s1, dst, cell)
        return _div(dst, s2, s1, k, order)
    return 0


cdef int _eval(const int* code, int ncode, const double* consts,
               const double* slots, const double* seed, int nslots,
               int k, int order, int stack_need,
               double* stack, double* scratch, double* out) nogil:
    """Run the program; result cell is copied into out. Returns 0 or an
    error code."""
    cdef int cell = 1
    if order >= 1:
        cell += k
    if order >= 2:
        cell += k * k
    cdef int sp = 0
    cdef int ip, op, arg, i, status
    cdef long m
    cdef double v, f0, d1, d2, sgn
    cdef double* top
    cdef double* s1 = scratch
    cdef double* s2 = scratch + cell
    cdef double* s3 = scratch + 2 * cell

    for ip in range(0, ncode, 2):
        op = code[ip]
        arg = code[ip + 1]
        if op == OP_CONST:
            if sp >= stack_need:
                return ERR_STACK
            top = stack + sp * cell
            _zero_cell(top, cell)
            top[0] = consts[arg]
            sp += 1
            continue
        if op == OP_VAR:
            if sp >= stack_need:
                return ERR_STACK
            top = stack + sp * cell
            _zero_cell(top, cell)
            top[0] = slots[arg]
            if order >= 1:
                if seed == NULL:
                    if arg < k:
                        top[1 + arg] = 1.0
                else:
                    for i in range(k):
                        top[1 + i] = seed[i * nslots + arg]
            sp += 1
            continue
        if op == OP_ADD or op == OP_SUB or op == OP_MUL or op == OP_DIV:
            sp -= 1
            top = stack + (sp - 1) * cell
            if op == OP_ADD:
                _add(s3, top, top + cell, k, order)
            elif op == OP_SUB:
                _sub(s3, top, top + cell, k, order)
            elif op == OP_MUL:
                _mul(s3, top, top + cell, k, order)
            else:
                status = _div(s3, top, top + cell, k, order)
                if status != 0:
                    return status
            _copy_cell(top, s3, cell)
            continue
        if op == OP_POW:
            sp -= 1
            top = stack + (sp - 1) * cell
            # constant-exponent detection: no derivative content at any order
            status = 1
            if order >= 1:
                for i in range(k):
                    if (top + cell)[1 + i] != 0.0:
                        status = 0
                        break
            if status == 1 and order >= 2:
                for i in range(k * k):
                    if (top + cell)[1 + k + i] != 0.0:
                        status = 0
                        break
            v = (top + cell)[0]
            if status == 1 and isfinite(v) and v == floor(v) and fabs(v) <= 2147483647.0:
                m = <long> v
                status = _powi(s3, top, m, k, order, cell, s1, s2)
                if status != 0:
                    return status
                _copy_cell(top, s3, cell)
                continue
            if top[0] > 0.0:
                # b^e = exp(e * ln b)
                v = top[0]
                _unary(s1, top, log(v), 1.0 / v, -1.0 / (v * v), k, order)
                _mul(s2, top + cell, s1, k, order)
                _unary(s3, s2, exp(s2[0]), exp(s2[0]), exp(s2[0]), k, order)
                _copy_cell(top, s3, cell)
                continue
            return ERR_POW
        if op == OP_POWI:
            top = stack + (sp - 1) * cell
            status = _powi(s3, top, arg, k, order, cell, s1, s2)
            if status != 0:
                return status
            _copy_cell(top, s3, cell)
            continue
        if op == OP_NEG:
            top = stack + (sp - 1) * cell
            _negate(s3, top, k, order)
            _copy_cell(top, s3, cell)
            continue
        # unary functions
        top = stack + (sp - 1) * cell
        v = top[0]
        if op == OP_SIN:
            f0 = sin(v); d1 = cos(v); d2 = -f0
        elif op == OP_COS:
            f0 = cos(v); d1 = -sin(v); d2 = -f0
        elif op == OP_EXP:
            f0 = exp(v); d1 = f0; d2 = f0
        elif op == OP_LN:
            if v <= 0.0:
                return ERR_LN
            f0 = log(v); d1 = 1.0 / v; d2 = -1.0 / (v * v)
        elif op == OP_SQRT:
            if v < 0.0:
                return ERR_SQRT
            if v == 0.0 and order >= 1:
                return ERR_SQRT0
            f0 = sqrt(v); d1 = 0.5 / f0 if v > 0.0 else 0.0
            d2 = -0.25 / (v * f0) if v > 0.0 else 0.0
        elif op == OP_TAN:
            f0 = tan(v); d1 = 1.0 + f0 * f0; d2 = 2.0 * f0 * d1
        elif op == OP_ABS:
            f0 = fabs(v)
            sgn = 1.0 if v > 0.0 else (-1.0 if v < 0.0 else 0.0)
            d1 = sgn; d2 = 0.0
        else:
            return ERR_BADOP
        _unary(s3, top, f0, d1, d2, k, order)
        _copy_cell(top, s3, cell)

    _copy_cell(out, stack + (sp - 1) * cell, cell)
    return 0


cdef void _raise(int status):
    if status == ERR_DIV0:
        raise DomainError("division by zero")
    if status == ERR_LN:
        raise DomainError("ln of a nonpositive argument")
    if status == ERR_SQRT:
        raise DomainError("sqrt of a negative argument")
    if status == ERR_SQRT0:
        raise DomainError("derivative of sqrt at zero")
    if status == ERR_POW:
        raise DomainError("zero or negative base with a non-integer exponent")
    if status == ERR_NONFINITE:
        raise NonFinite("flow state overflowed")
    if status == ERR_STACK:
        raise ValueError("stack overflow in compiled evaluator")
    raise ValueError("bad opcode in compiled evaluator")


cdef int _cell_size(int k, int order) nogil:
    cdef int cell = 1
    if order >= 1:
        cell += k
    if order >= 2:
        cell += k * k
    return cell


def eval_value(const int[::1] code, const double[::1] consts,
               const double[::1] slots, int stack_need):
    cdef int cell = 1
    cdef double* buf = <double*> malloc((stack_need + 4) * cell * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* scratch = buf + stack_need * cell
    cdef double* out = scratch + 3 * cell
    cdef const double* cptr = &consts[0] if consts.shape[0] > 0 else NULL
    cdef int status
    with nogil:
        status = _eval(&code[0], code.shape[0], cptr, &slots[0], NULL,
                       slots.shape[0], 0, 0, stack_need, buf, scratch, out)
    cdef double value = out[0]
    free(buf)
    if status != 0:
        _raise(status)
    return value


def eval_grad(const int[::1] code, const double[::1] consts,
              const double[::1] slots, int k, seed, int stack_need,
              double[::1] out_grad):
    cdef int cell = _cell_size(k, 1)
    cdef double* buf = <double*> malloc((stack_need + 4) * cell * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* scratch = buf + stack_need * cell
    cdef double* out = scratch + 3 * cell
    cdef const double[:, ::1] sview
    cdef const double* sptr = NULL
    if seed is not None:
        sview = seed
        sptr = &sview[0, 0]
    cdef const double* cptr = &consts[0] if consts.shape[0] > 0 else NULL
    cdef int status, i
    with nogil:
        status = _eval(&code[0], code.shape[0], cptr, &slots[0], sptr,
                       slots.shape[0], k, 1, stack_need, buf, scratch, out)
        if status == 0:
            for i in range(k):
                out_grad[i] = out[1 + i]
    cdef double value = out[0]
    free(buf)
    if status != 0:
        _raise(status)
    return value


def eval_hess(const int[::1] code, const double[::1] consts,
              const double[::1] slots, int k, seed, int stack_need,
              double[::1] out_grad, double[::1] out_hess):
    cdef int cell = _cell_size(k, 2)
    cdef double* buf = <double*> malloc((stack_need + 4) * cell * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* scratch = buf + stack_need * cell
    cdef double* out = scratch + 3 * cell
    cdef const double[:, ::1] sview
    cdef const double* sptr = NULL
    if seed is not None:
        sview = seed
        sptr = &sview[0, 0]
    cdef const double* cptr = &consts[0] if consts.shape[0] > 0 else NULL
    cdef int status, i
    with nogil:
        status = _eval(&code[0], code.shape[0], cptr, &slots[0], sptr,
                       slots.shape[0], k, 2, stack_need, buf, scratch, out)
        if status == 0:
            for i in range(k):
                out_grad[i] = out[1 + i]
            for i in range(k * k):
                out_hess[i] = out[1 + k + i]
    cdef double value = out[0]
    free(buf)
    if status != 0:
        _raise(status)
    return value


cdef int _field_c(const int* code, int ncode, const double* consts,
                  double* work, int nslots, int n, const double* y,
                  int stack_need, double* stack, double* scratch,
                  double* out, double* f) nogil:
    """Hamiltonian field (df/dp, -df/dq) at state y via a first-order pass."""
    cdef int a, status
    for a in range(2 * n):
        work[a] = y[a]
    status = _eval(code, ncode, consts, work, NULL, nslots, 2 * n, 1,
                   stack_need, stack, scratch, out)
    if status != 0:
        return status
    for a in range(n):
        f[a] = out[1 + n + a]
        f[n + a] = -out[1 + a]
    return 0


def rk4_flow(const int[::1] code, const double[::1] consts,
             int n, const double[::1] slots, double s, long steps,
             int stack_need, double[::1] out_y):
    cdef int nslots = slots.shape[0]
    cdef int k = 2 * n
    cdef int cell = _cell_size(k, 1)
    cdef int nz = 2 * n
    cdef long total = (stack_need + 4) * cell + nslots + 6 * nz
    cdef double* buf = <double*> malloc(total * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* stack = buf
    cdef double* scratch = stack + stack_need * cell
    cdef double* out = scratch + 3 * cell
    cdef double* work = out + cell
    cdef double* y = work + nslots
    cdef double* k1 = y + nz
    cdef double* k2 = k1 + nz
    cdef double* k3 = k2 + nz
    cdef double* k4 = k3 + nz
    cdef double* yt = k4 + nz
    cdef const double* cptr = &consts[0] if consts.shape[0] > 0 else NULL
    cdef int a, status = 0
    cdef long step
    cdef double h = s / steps
    cdef double hh = 0.5 * h
    cdef double h6 = h / 6.0
    with nogil:
        for a in range(nslots):
            work[a] = slots[a]
        for a in range(nz):
            y[a] = slots[a]
        for step in range(steps):
            status = _field_c(&code[0], code.shape[0], cptr, work,
                              nslots, n, y, stack_need, stack, scratch, out, k1)
            if status != 0:
                break
            for a in range(nz):
                yt[a] = y[a] + hh * k1[a]
            status = _field_c(&code[0], code.shape[0], cptr, work,
                              nslots, n, yt, stack_need, stack, scratch, out, k2)
            if status != 0:
                break
            for a in range(nz):
                yt[a] = y[a] + hh * k2[a]
            status = _field_c(&code[0], code.shape[0], cptr, work,
                              nslots, n, yt, stack_need, stack, scratch, out, k3)
            if status != 0:
                break
            for a in range(nz):
                yt[a] = y[a] + h * k3[a]
            status = _field_c(&code[0], code.shape[0], cptr, work,
                              nslots, n, yt, stack_need, stack, scratch, out, k4)
            if status != 0:
                break
            for a in range(nz):
                y[a] = y[a] + h6 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a])
            for a in range(nz):
                if not isfinite(y[a]):
                    status = ERR_NONFINITE
                    break
            if status != 0:
                break
        if status == 0:
            for a in range(nz):
                out_y[a] = y[a]
    free(buf)
    if status != 0:
        _raise(status)


cdef int _field_b_c(const int* code, int ncode, const double* consts,
                    double* work, int nslots, int n, const double* y,
                    int stack_need, double* stack, double* scratch,
                    double* out, double* f, double* B) nogil:
    """Field plus its jacobian B over directions (q, p, t)."""
    cdef int m = 2 * n + 1
    cdef int a, b, status
    for a in range(2 * n):
        work[a] = y[a]
    status = _eval(code, ncode, consts, work, NULL, nslots, m, 2,
                   stack_need, stack, scratch, out)
    if status != 0:
        return status
    for a in range(n):
        f[a] = out[1 + n + a]
        f[n + a] = -out[1 + a]
    # hess rows: out[1 + m + i*m + j]
    for a in range(n):
        for b in range(m):
            B[a * m + b] = out[1 + m + (n + a) * m + b]
            B[(n + a) * m + b] = -out[1 + m + a * m + b]
    for b in range(m):
        B[2 * n * m + b] = 0.0
    return 0


def rk4_flow_tangent(const int[::1] code, const double[::1] consts,
                     int n, const double[::1] slots, double s, long steps,
                     int stack_need, double[::1] out_y, double[:, ::1] out_m):
    cdef int nslots = slots.shape[0]
    cdef int m = 2 * n + 1
    cdef int cell = _cell_size(m, 2)
    cdef int nz = 2 * n
    cdef long total = ((stack_need + 4) * cell + nslots + 6 * nz
                       + 7 * m * m)
    cdef double* buf = <double*> malloc(total * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* stack = buf
    cdef double* scratch = stack + stack_need * cell
    cdef double* out = scratch + 3 * cell
    cdef double* work = out + cell
    cdef double* y = work + nslots
    cdef double* k1 = y + nz
    cdef double* k2 = k1 + nz
    cdef double* k3 = k2 + nz
    cdef double* k4 = k3 + nz
    cdef double* yt = k4 + nz
    cdef double* M = yt + nz
    cdef double* m1 = M + m * m
    cdef double* m2 = m1 + m * m
    cdef double* m3 = m2 + m * m
    cdef double* m4 = m3 + m * m
    cdef double* B = m4 + m * m
    cdef double* Mt = B + m * m
    cdef const double* cptr = &consts[0] if consts.shape[0] > 0 else NULL
    cdef int a, b, status = 0
    cdef long step
    cdef double h = s / steps
    cdef double hh = 0.5 * h
    cdef double h6 = h / 6.0
    with nogil:
        for a in range(nslots):
            work[a] = slots[a]
        for a in range(nz):
            y[a] = slots[a]
        for a in range(m * m):
            M[a] = 0.0
        for a in range(m):
            M[a * m + a] = 1.0
        for step in range(steps):
            # stage 1
            status = _field_b_c(&code[0], code.shape[0], cptr, work,
                                nslots, n, y, stack_need, stack, scratch,
                                out, k1, B)
            if status != 0:
                break
            _matmul(m1, B, M, m)
            # stage 2
            for a in range(nz):
                yt[a] = y[a] + hh * k1[a]
            for a in range(m * m):
                Mt[a] = M[a] + hh * m1[a]
            status = _field_b_c(&code[0], code.shape[0], cptr, work,
                                nslots, n, yt, stack_need, stack, scratch,
                                out, k2, B)
            if status != 0:
                break
            _matmul(m2, B, Mt, m)
            # stage 3
            for a in range(nz):
                yt[a] = y[a] + hh * k2[a]
            for a in range(m * m):
                Mt[a] = M[a] + hh * m2[a]
            status = _field_b_c(&code[0], code.shape[0], cptr, work,
                                nslots, n, yt, stack_need, stack, scratch,
                                out, k3, B)
            if status != 0:
                break
            _matmul(m3, B, Mt, m)
            # stage 4
            for a in range(nz):
                yt[a] = y[a] + h * k3[a]
            for a in range(m * m):
                Mt[a] = M[a] + h * m3[a]
            status = _field_b_c(&code[0], code.shape[0], cptr, work,
                                nslots, n, yt, stack_need, stack, scratch,
                                out, k4, B)
            if status != 0:
                break
            _matmul(m4, B, Mt, m)
            for a in range(nz):
                y[a] = y[a] + h6 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a])
            for a in range(m * m):
                M[a] = M[a] + h6 * (m1[a] + 2.0 * m2[a] + 2.0 * m3[a] + m4[a])
            for a in range(nz):
                if not isfinite(y[a]):
                    status = ERR_NONFINITE
                    break
            if status != 0:
                break
        if status == 0:
            for a in range(nz):
                out_y[a] = y[a]
            for a in range(nz):
                for b in range(m):
                    out_m[a, b] = M[a * m + b]
    free(buf)
    if status != 0:
        _raise(status)


cdef inline void _matmul(double* dst, const double* A, const double* X,
                         int m) nogil:
    cdef int a, b, c
    cdef double acc
    for a in range(m):
        for b in range(m):
            acc = 0.0
            for c in range(m):
                acc += A[a * m + c] * X[c * m + b]
            dst[a * m + b] = acc
