"""Exception hierarchy shared by every module of the package."""


class CellCodeError(Exception):
    """Base class for all errors raised by :mod:`cellcode`."""


class SpaceTooLarge(CellCodeError):
    """The space does not fit the word budget, or a set would exceed the allocation cap."""


class CoordOutOfRange(CellCodeError, IndexError):
    """A digital coordinate falls outside ``[0, coordmax[i]]``."""


class NotASurfel(CellCodeError, ValueError):
    pass


class NotABel(CellCodeError, ValueError):
    """The surfel does not separate an object spel from a non-object spel."""


class ObjectTouchesBorder(CellCodeError, ValueError):
    """The object has a spel on the first or last slice of some axis."""


class DuplicateOrientation(CellCodeError, ValueError):
    """A signed cell was merged into a set that already holds it with the same sign."""


class NotInFamily(CellCodeError, ValueError):
    pass


class FamilyMismatch(CellCodeError, ValueError):
    """Binary set operation between sets of different spaces, families or kinds."""


class NotInObject(CellCodeError, ValueError):
    pass


class EmptyObject(CellCodeError, ValueError):
    pass


class BoxOutOfBounds(CellCodeError, ValueError):
    pass


class BallTouchesBorder(CellCodeError, ValueError):
    pass


class BadMagic(CellCodeError, ValueError):
    pass


class HeaderMismatch(CellCodeError, ValueError):
    pass


class TruncatedPayload(CellCodeError, ValueError):
    pass


class SizeMismatch(CellCodeError, ValueError):
    pass


class WrongDimension(CellCodeError, ValueError):
    pass
