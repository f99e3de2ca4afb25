"""Exception hierarchy shared by all qdx modules."""


class QdxError(Exception):
    """Base class for every error raised by qdx."""


class DomainError(QdxError, ValueError):
    """A parameter lies outside the range where a formula or theorem applies."""


class OutOfRangeError(QdxError, IndexError):
    """A site index falls outside a finite potential table."""


class BandCountMismatch(QdxError):
    """The band scan did not find exactly F_k intervals."""


class RootCountMismatch(QdxError):
    """Root isolation did not find exactly F_k roots."""


class DegenerateFit(QdxError):
    """Too few usable points for a regression."""


class TolUnreachable(QdxError):
    """The requested accuracy needs a window larger than the configured cap."""


class GridTooCoarse(QdxError):
    """A quadrature's estimated error exceeds its tolerance."""


class BoxCapExceeded(QdxError):
    """A resolvent solve needs more padding than the configured cap."""


class SeriesTooShort(QdxError):
    """A time series does not span enough decades for exponent estimation."""


class ConfigError(QdxError, ValueError):
    """Invalid experiment configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class SchemaError(QdxError, ValueError):
    """A data file does not match its declared schema."""
