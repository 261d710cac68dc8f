class ExchangeKineticsError(Exception):
    """Base class of every error raised by exchange_kinetics."""


class NormalizationError(ExchangeKineticsError, ValueError):
    pass


class InsufficientWindowError(ExchangeKineticsError, ValueError):
    pass


class UndefinedDivergenceError(ExchangeKineticsError, ValueError):
    pass


class NonPositiveMeanError(ExchangeKineticsError, ValueError):
    pass


class DegenerateDistributionError(ExchangeKineticsError, ValueError):
    pass


class IntegralityError(ExchangeKineticsError, ValueError):
    pass


class HorizonExceededError(ExchangeKineticsError, RuntimeError):
    pass


class WindowOverflowError(ExchangeKineticsError, RuntimeError):
    pass


class ConfigError(ExchangeKineticsError, ValueError):
    def __init__(self, key: str, message: str) -> None:
        """
        key: str
            Name of the offending config key or flag (without dashes).
        message: str
            Human readable description of the violated constraint.
        """
        super().__init__(f"{key}: {message}")
        self.key = key
