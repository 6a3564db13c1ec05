"""Pure-Python integer-preserving simplex tableau.

Every stored entry is ``det * (rational tableau entry)`` where ``det`` is the
determinant of the current basis matrix, so all entries stay integral and the
update ``(p * a - f * b) // det`` is an exact division.  ``det`` is kept
positive by negating the whole tableau after a pivot on a negative element.

The compiled kernel in ``_tableau.pyx`` implements the same class with the
same pivot sequence; the two are interchangeable.
"""

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2


class Tableau:
    """Dense integer tableau with ``n_constraints`` constraint rows followed by
    objective rows.  The last column holds the right-hand side."""

    backend = "python"

    def __init__(self, rows, basis, n_constraints):
        if len(basis) != n_constraints:
            raise ValueError("basis must name one column per constraint row")
        width = len(rows[0]) if rows else 0
        for row in rows:
            if len(row) != width:
                raise ValueError("ragged tableau")
        self._rows = [[int(v) for v in row] for row in rows]
        self._basis = [int(b) for b in basis]
        self._m = n_constraints
        self._det = 1
        self.pivots = 0

    @property
    def nrows(self):
        return len(self._rows)

    @property
    def ncols(self):
        return len(self._rows[0]) if self._rows else 0

    @property
    def det(self):
        return self._det

    @property
    def basis(self):
        return list(self._basis)

    def get(self, i, j):
        return self._rows[i][j]

    def row(self, i):
        return list(self._rows[i])

    def column(self, j):
        return [row[j] for row in self._rows]

    def pivot(self, r, c):
        rows = self._rows
        prow = rows[r]
        p = prow[c]
        if p == 0:
            raise ZeroDivisionError("pivot element is zero")
        d = self._det
        for i, row in enumerate(rows):
            if i == r:
                continue
            f = row[c]
            if f == 0:
                if p != d:
                    rows[i] = [p * a // d for a in row]
            else:
                rows[i] = [(p * a - f * b) // d for a, b in zip(row, prow)]
        self._det = p
        if p < 0:
            self._rows = [[-a for a in row] for row in self._rows]
            self._det = -p
        self._basis[r] = c
        self.pivots += 1

    def run(self, obj, allowed, max_pivots=100000):
        """Bland's-rule primal simplex minimising objective row ``obj``.

        ``allowed[j]`` marks columns that may enter the basis.  Returns
        ``(status, column)``; ``column`` is the entering column whose ratio
        test failed when the status is ``UNBOUNDED`` and -1 otherwise.
        """
        m = self._m
        last = self.ncols - 1
        for _ in range(max_pivots):
            zrow = self._rows[obj]
            c = -1
            for j in range(last):
                if allowed[j] and zrow[j] < 0:
                    c = j
                    break
            if c < 0:
                return OPTIMAL, -1
            best = -1
            best_num = best_den = 0
            for i in range(m):
                a = self._rows[i][c]
                if a <= 0:
                    continue
                num = self._rows[i][last]
                if best < 0:
                    best, best_num, best_den = i, num, a
                    continue
                lhs = num * best_den
                rhs = best_num * a
                if lhs < rhs or (lhs == rhs and self._basis[i] < self._basis[best]):
                    best, best_num, best_den = i, num, a
            if best < 0:
                return UNBOUNDED, c
            self.pivot(best, c)
        return ITERATION_LIMIT, -1
