# cython: boundscheck=False, wraparound=False, cdivision=True
"""GMP-backed integer-preserving simplex tableau.

Drop-in replacement for ``_tableau_py.Tableau``: identical constructor,
accessors, pivot arithmetic and Bland's-rule ordering, so both kernels visit
the same sequence of bases.  The pivot loop runs without the GIL.
"""

from libc.stdlib cimport malloc, free
from cpython.long cimport PyLong_FromLong

cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef __mpz_struct mpz_t[1]
    ctypedef __mpz_struct* mpz_ptr

    void mpz_init(mpz_ptr) nogil
    void mpz_clear(mpz_ptr) nogil
    void mpz_set(mpz_ptr, mpz_ptr) nogil
    void mpz_set_si(mpz_ptr, long) nogil
    int mpz_set_str(mpz_ptr, const char*, int) nogil
    char* mpz_get_str(char*, int, mpz_ptr) nogil
    long mpz_get_si(mpz_ptr) nogil
    int mpz_fits_slong_p(mpz_ptr) nogil
    void mpz_mul(mpz_ptr, mpz_ptr, mpz_ptr) nogil
    void mpz_submul(mpz_ptr, mpz_ptr, mpz_ptr) nogil
    void mpz_divexact(mpz_ptr, mpz_ptr, mpz_ptr) nogil
    void mpz_neg(mpz_ptr, mpz_ptr) nogil
    int mpz_cmp(mpz_ptr, mpz_ptr) nogil
    int mpz_sgn(mpz_ptr) nogil
    size_t mpz_sizeinbase(mpz_ptr, int) nogil

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2

cdef long _SMALL = 1 << 62


cdef inline void _set_from_py(mpz_ptr z, object v) except *:
    if -_SMALL < v < _SMALL:
        mpz_set_si(z, <long>v)
    else:
        s = str(v).encode("ascii")
        if mpz_set_str(z, s, 10) != 0:
            raise ValueError("cannot convert %r" % (v,))


cdef inline object _to_py(mpz_ptr z):
    cdef char* buf
    if mpz_fits_slong_p(z):
        return PyLong_FromLong(mpz_get_si(z))
    buf = <char*>malloc(mpz_sizeinbase(z, 16) + 2)
    if buf == NULL:
        raise MemoryError()
    try:
        mpz_get_str(buf, 16, z)
        out = int(buf.decode("ascii"), 16)
    finally:
        free(buf)
    return out


cdef class Tableau:
    """Dense integer tableau with ``n_constraints`` constraint rows followed by
    objective rows.  The last column holds the right-hand side."""

    cdef mpz_t* _data
    cdef int _nrows
    cdef int _ncols
    cdef int _m
    cdef int* _basis
    cdef mpz_t _det
    cdef mpz_t _t1
    cdef mpz_t _t2
    cdef mpz_t _f
    cdef public long pivots
    cdef bint _ready

    backend = "gmp"

    def __cinit__(self):
        self._data = NULL
        self._basis = NULL
        self._ready = False

    def __init__(self, rows, basis, n_constraints):
        cdef int i, j
        if len(basis) != n_constraints:
            raise ValueError("basis must name one column per constraint row")
        self._nrows = len(rows)
        self._ncols = len(rows[0]) if rows else 0
        for row in rows:
            if len(row) != self._ncols:
                raise ValueError("ragged tableau")
        self._m = n_constraints
        self._data = <mpz_t*>malloc(max(1, self._nrows * self._ncols) * sizeof(mpz_t))
        self._basis = <int*>malloc(max(1, self._m) * sizeof(int))
        if self._data == NULL or self._basis == NULL:
            raise MemoryError()
        for i in range(self._nrows * self._ncols):
            mpz_init(self._data[i])
        mpz_init(self._det)
        mpz_init(self._t1)
        mpz_init(self._t2)
        mpz_init(self._f)
        self._ready = True
        mpz_set_si(self._det, 1)
        for i in range(self._nrows):
            row = rows[i]
            for j in range(self._ncols):
                _set_from_py(self._data[i * self._ncols + j], int(row[j]))
        for i in range(self._m):
            self._basis[i] = int(basis[i])
        self.pivots = 0

    def __dealloc__(self):
        cdef int i
        if self._ready:
            for i in range(self._nrows * self._ncols):
                mpz_clear(self._data[i])
            mpz_clear(self._det)
            mpz_clear(self._t1)
            mpz_clear(self._t2)
            mpz_clear(self._f)
        if self._data != NULL:
            free(self._data)
        if self._basis != NULL:
            free(self._basis)

    @property
    def nrows(self):
        return self._nrows

    @property
    def ncols(self):
        return self._ncols

    @property
    def det(self):
        return _to_py(self._det)

    @property
    def basis(self):
        return [self._basis[i] for i in range(self._m)]

    def get(self, int i, int j):
        if not (0 <= i < self._nrows and 0 <= j < self._ncols):
            raise IndexError("tableau index out of range")
        return _to_py(self._data[i * self._ncols + j])

    def row(self, int i):
        if not 0 <= i < self._nrows:
            raise IndexError("tableau row out of range")
        return [_to_py(self._data[i * self._ncols + j]) for j in range(self._ncols)]

    def column(self, int j):
        if not 0 <= j < self._ncols:
            raise IndexError("tableau column out of range")
        return [_to_py(self._data[i * self._ncols + j]) for i in range(self._nrows)]

    cdef void _pivot(self, int r, int c) noexcept nogil:
        cdef int i, k
        cdef int n = self._ncols
        cdef mpz_ptr p = self._data[r * n + c]
        cdef mpz_t* prow = self._data + r * n
        cdef mpz_t* row
        for i in range(self._nrows):
            if i == r:
                continue
            row = self._data + i * n
            mpz_set(self._f, row[c])
            if mpz_sgn(self._f) == 0:
                if mpz_cmp(p, self._det) != 0:
                    for k in range(n):
                        mpz_mul(self._t1, p, row[k])
                        mpz_divexact(row[k], self._t1, self._det)
            else:
                for k in range(n):
                    mpz_mul(self._t1, p, row[k])
                    mpz_submul(self._t1, self._f, prow[k])
                    mpz_divexact(row[k], self._t1, self._det)
        mpz_set(self._det, p)
        if mpz_sgn(self._det) < 0:
            for i in range(self._nrows * n):
                mpz_neg(self._data[i], self._data[i])
            mpz_neg(self._det, self._det)
        self._basis[r] = c
        self.pivots += 1

    def pivot(self, int r, int c):
        if not (0 <= r < self._m and 0 <= c < self._ncols - 1):
            raise IndexError("pivot position out of range")
        if mpz_sgn(self._data[r * self._ncols + c]) == 0:
            raise ZeroDivisionError("pivot element is zero")
        with nogil:
            self._pivot(r, c)

    cdef int _run(self, int obj, const unsigned char* allowed, long max_pivots,
                  int* entering) noexcept nogil:
        cdef int n = self._ncols
        cdef int last = n - 1
        cdef int m = self._m
        cdef int i, j, c, best
        cdef long it
        cdef int cmpv
        cdef mpz_t* zrow
        for it in range(max_pivots):
            zrow = self._data + obj * n
            c = -1
            for j in range(last):
                if allowed[j] and mpz_sgn(zrow[j]) < 0:
                    c = j
                    break
            if c < 0:
                entering[0] = -1
                return 0
            best = -1
            for i in range(m):
                if mpz_sgn(self._data[i * n + c]) <= 0:
                    continue
                if best < 0:
                    best = i
                    continue
                # rhs_i / a_ic  vs  rhs_best / a_best,c  (both denominators > 0)
                mpz_mul(self._t1, self._data[i * n + last], self._data[best * n + c])
                mpz_mul(self._t2, self._data[best * n + last], self._data[i * n + c])
                cmpv = mpz_cmp(self._t1, self._t2)
                if cmpv < 0 or (cmpv == 0 and self._basis[i] < self._basis[best]):
                    best = i
            if best < 0:
                entering[0] = c
                return 1
            self._pivot(best, c)
        entering[0] = -1
        return 2

    def run(self, int obj, allowed, long max_pivots=100000):
        """Bland's-rule primal simplex minimising objective row ``obj``.

        Returns ``(status, column)`` exactly like the pure-Python kernel.
        """
        cdef int status
        cdef int entering = -1
        cdef bytes mask = bytes(1 if a else 0 for a in allowed)
        cdef const unsigned char* cmask = mask
        if len(mask) != self._ncols - 1:
            raise ValueError("allowed mask has wrong length")
        with nogil:
            status = self._run(obj, cmask, max_pivots, &entering)
        return status, entering
