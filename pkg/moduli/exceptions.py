"""
Exception hierarchy shared by every app of the project
"""


class QuantRSError(Exception):
    """Base class for errors raised by the bound calculus and its consumers"""


class InvalidParameterError(QuantRSError, ValueError):
    """A numeric argument lies outside the range a bound is defined on"""

    def __init__(self, name, value, expected):
        self.name = name
        self.value = value
        self.expected = expected
        super().__init__(f"{name}={value!r} rejected: expected {expected}")


class CertificateError(QuantRSError):
    """A process family cannot certify the hypothesis a caller asked for"""


class DivergenceHorizonError(QuantRSError):
    """A partial-sum scan for a rate of divergence ran past its hard cap"""

    def __init__(self, start, target, cap):
        self.start = start
        self.target = target
        self.cap = cap
        super().__init__(
            f"partial sums from index {start} did not reach {target!r} within {cap} terms"
        )
