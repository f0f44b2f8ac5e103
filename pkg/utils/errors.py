class PoincareKernelError(Exception):
    """Base class for every error raised by this package"""
    pass


class DomainError(PoincareKernelError, ValueError):
    """A point or model parameter lies outside the model domain"""
    pass


class PreconditionError(PoincareKernelError, ValueError):
    """An operation was called outside the regime where it is asserted"""
    pass


class ResourceError(PoincareKernelError):
    """Group enumeration grew past a configured cap"""

    def __init__(self, message, partial_count=0):
        super().__init__(message)
        # Number of distinct elements found before the cap was hit
        self.partial_count = partial_count


class CacheIntegrityError(PoincareKernelError):
    """A cached artifact failed its content-hash check"""
    pass


class ConfigError(PoincareKernelError, ValueError):
    """Invalid run configuration"""
    pass
