"""Exact sparse row reduction over the rationals.

Vectors are dicts ``key -> Fraction``; keys must be mutually comparable.
Rows are kept in echelon form by their largest key, so a vector lies in the
span iff repeatedly cancelling its largest key against a stored row reaches
zero.
"""

from fractions import Fraction


def _axpy(target, factor, source):
    for k, v in source.items():
        nv = target.get(k, 0) - factor * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


class RowSpace:
    def __init__(self):
        self.rows = {}  # pivot -> (vector, combination of input tags)

    def __len__(self):
        return len(self.rows)

    def _reduce(self, vec, combo):
        vec = dict(vec)
        while vec:
            k = max(vec)
            row = self.rows.get(k)
            if row is None:
                break
            rvec, rcombo = row
            f = Fraction(vec[k]) / rvec[k]
            _axpy(vec, f, rvec)
            _axpy(combo, f, rcombo)
        return vec, combo

    def add(self, vec, tag):
        """Insert a vector; return False if it was already in the span."""
        v, c = self._reduce(vec, {tag: Fraction(1)})
        if not v:
            return False
        self.rows[max(v)] = (v, c)
        return True

    def solve(self, target):
        """Coefficients ``{tag: c}`` with ``sum c * vec_tag == target``.

        Returns None when the target is outside the span.
        """
        # reducing target - sum f_i row_i = 0 gives target = sum f_i row_i,
        # and each row is sum combo_row[tag] * vec_tag
        v, c = self._reduce(target, {})
        if v:
            return None
        return {tag: -coef for tag, coef in c.items() if coef}
