"""Exception hierarchy shared by the library and the command line front end."""


class PeerDiscError(Exception):
    """Base class for every error raised by peerdisc."""

    exit_code = 1


class DomainError(PeerDiscError, ValueError):
    """An argument lies outside the mathematical domain of a function."""

    exit_code = 3


class BracketError(PeerDiscError, ValueError):
    """The root bracket does not contain a sign change."""

    exit_code = 3


class ConvergenceError(PeerDiscError, RuntimeError):
    """An iterative method exhausted its iteration budget."""

    exit_code = 3


class IntegrationError(PeerDiscError, RuntimeError):
    """Adaptive quadrature did not reach its tolerance.

    The best available estimate is kept on ``value`` and ``abserr``.
    """

    exit_code = 3

    def __init__(self, message, value=float("nan"), abserr=float("inf")):
        super().__init__(message)
        self.value = value
        self.abserr = abserr


class CapabilityError(PeerDiscError, ValueError):
    """The request is valid mathematically but beyond what is implemented."""

    exit_code = 3


class RegimeError(PeerDiscError, ValueError):
    """A closed form was requested outside the channel regime it holds in."""

    exit_code = 4


class ConfigError(PeerDiscError, ValueError):
    """Invalid scenario, simulation or sweep configuration.

    ``field`` names the offending key, e.g. ``"channel.alpha"``.
    """

    exit_code = 2

    def __init__(self, message, field=None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field
