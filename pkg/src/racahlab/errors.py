"""Exception types shared across the package."""


class RacahlabError(Exception):
    pass


class PoleError(RacahlabError, ValueError):
    """A gamma function or Pochhammer denominator hits a pole."""


class DivergenceError(RacahlabError, ValueError):
    """A hypergeometric series does not converge for the given parameters."""


class ParameterError(RacahlabError, ValueError):
    """Parameters violate a documented domain restriction."""


class DomainError(RacahlabError, ValueError):
    """Evaluation point outside (or too close to the edge of) the open octant."""
