"""Exception hierarchy shared by all modules."""


class LineComplexError(Exception):
    """Base class for every error raised by the package."""


class SingularPivot(LineComplexError):
    def __init__(self, site, l, detail=""):
        self.site = tuple(site) if site is not None else None
        self.l = l
        msg = f"zero pivot M^{{{l}{l}}} at site {self.site}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class IndexClash(LineComplexError):
    pass


class ShapeMismatch(LineComplexError):
    pass


class MissingCauchyDatum(LineComplexError):
    def __init__(self, i, k, n):
        self.i, self.k, self.n = i, k, tuple(n)
        super().__init__(f"missing Cauchy datum M^{{{i},{k}}} at {self.n}")


class UnassignedSite(LineComplexError, KeyError):
    def __str__(self):
        return f"site {self.args[0]} has not been assigned"


class ReassignedSite(LineComplexError):
    pass


class PathInconsistency(LineComplexError):
    pass


class DegeneratePair(LineComplexError):
    pass


class SkewLines(LineComplexError):
    pass


class IdenticalLines(LineComplexError):
    pass


class CollinearTriple(LineComplexError):
    pass


class LineInPlane(LineComplexError):
    pass


class NonGenericPosition(LineComplexError):
    """A rank required by a construction was not attained."""

    def __init__(self, msg, site=None):
        self.site = tuple(site) if site is not None else None
        if site is not None:
            msg = f"{msg} [site {self.site}]"
        super().__init__(msg)


# alias used when the spans in the CP^3 transversal family collapse
DegenerateConfiguration = NonGenericPosition


class CollinearityViolation(LineComplexError):
    pass


class NormalizationFailure(LineComplexError):
    pass


class RankDeficiency(LineComplexError):
    pass


class DegeneratePolarity(LineComplexError):
    pass


class DivisionByZero(LineComplexError, ZeroDivisionError):
    pass
