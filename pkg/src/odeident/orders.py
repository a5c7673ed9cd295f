"""Term orders on exponent vectors.

A term order is exposed as a key function: monomial ``a`` precedes
monomial ``b`` in the order exactly when ``key(a) < key(b)``.  Keys are
plain tuples so comparisons run at C speed.
"""

from __future__ import annotations


class TermOrder:
    """Total order on monomials compatible with multiplication.

    kind is one of ``degrevlex``, ``lex``, or ``block``.  A block order
    splits the variable list at ``n_elim``: the first ``n_elim``
    variables form the elimination block and dominate the comparison, so
    basis elements whose keys carry a zero block part live in the
    elimination ideal.
    """

    __slots__ = ("kind", "n_elim", "inner", "outer")

    def __init__(self, kind, n_elim=0, inner="degrevlex", outer="degrevlex"):
        if kind not in ("degrevlex", "lex", "block"):
            raise ValueError(f"unknown term order {kind!r}")
        self.kind = kind
        self.n_elim = n_elim
        self.inner = inner
        self.outer = outer

    @staticmethod
    def degrevlex():
        return TermOrder("degrevlex")

    @staticmethod
    def lex():
        return TermOrder("lex")

    @staticmethod
    def block(n_elim, inner="degrevlex", outer="degrevlex"):
        return TermOrder("block", n_elim=n_elim, inner=inner, outer=outer)

    def key_function(self, nvars):
        """Return ``key(exps) -> flat int tuple`` implementing the order
        on exponent tuples of length ``nvars``.  Keys of equal-length
        exponent vectors all have the same length, so tuple comparison
        (and elementwise negation, for max-heaps) is well defined."""
        if self.kind == "lex":
            return _lex_key
        if self.kind == "degrevlex":
            return _degrevlex_key
        n = self.n_elim
        if not 0 < n < nvars:
            raise ValueError("block order needs 0 < n_elim < nvars")
        outer = _lex_key if self.outer == "lex" else _degrevlex_key
        inner = _lex_key if self.inner == "lex" else _degrevlex_key

        def key(exps, _n=n, _outer=outer, _inner=inner):
            return _outer(exps[:_n]) + _inner(exps[_n:])

        return key

    def __eq__(self, other):
        return (
            isinstance(other, TermOrder)
            and (self.kind, self.n_elim, self.inner, self.outer)
            == (other.kind, other.n_elim, other.inner, other.outer)
        )

    def __hash__(self):
        return hash((self.kind, self.n_elim, self.inner, self.outer))

    def __repr__(self):
        if self.kind == "block":
            return f"TermOrder.block({self.n_elim}, inner={self.inner!r}, outer={self.outer!r})"
        return f"TermOrder.{self.kind}()"


def _lex_key(exps):
    return exps


def _degrevlex_key(exps):
    # degrevlex: higher total degree wins; ties broken by the *smallest*
    # exponent on the last variable where they differ, i.e. lexicographic
    # comparison of the negated reversed vector.
    return (sum(exps), *(-e for e in reversed(exps)))
