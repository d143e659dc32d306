"""Exception types shared across the library."""


class DkError(Exception):
    """Base class for all library errors."""


class ShapeMismatch(DkError):
    """Matrix or complex dimensions are inconsistent."""


class CompositionNotZero(DkError):
    """A pair of maps expected to compose to zero does not."""


class NotAComplex(DkError):
    """d.d != 0 somewhere; carries the offending degree and a witness entry."""

    def __init__(self, degree, witness=None, msg=None):
        self.degree = degree
        self.witness = witness
        super().__init__(msg or f"d^2 != 0 at degree {degree} (witness {witness})")


class DegreeOutOfRange(DkError):
    """Requested degree outside the range the truncation can certify."""


class NotComposable(DkError):
    """Morphisms do not share the required object."""


class InvalidPresentation(DkError):
    """Explicit category presentation violates the category axioms."""


class InfiniteCategory(DkError):
    """Operation requires a finite category with all objects materialized."""


class NotCatenary(DkError):
    """Operation requires a declared catenary category."""


class MissingSign(DkError):
    """An orientation does not cover every codimension-1 mono."""


class BaseMismatch(DkError):
    """Presheaf and integrator live over different base categories."""


class NotFiniteType(DkError):
    """Integrator is not free of finite type in some degree."""
