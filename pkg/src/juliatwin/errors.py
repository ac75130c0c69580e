"""Exception hierarchy. The CLI maps each class to its own exit code."""


class JuliaTwinError(Exception):
    pass


class ModeMismatchError(JuliaTwinError, TypeError):
    """Exact and float objects were mixed in one operation."""


class DegreeBudgetError(JuliaTwinError):
    """A composition or root solve would exceed the configured degree budget."""


class RootFinderError(JuliaTwinError):
    pass


class CoprimalityError(JuliaTwinError, ValueError):
    pass


class NotParabolicError(JuliaTwinError, ValueError):
    pass


class MapFormatError(JuliaTwinError, ValueError):
    """Malformed map literal or expression."""
