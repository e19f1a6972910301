"""Exception hierarchy shared by every bsmkit module."""


class BSMError(Exception):
    """Base class for all bsmkit errors."""


class ParameterError(BSMError, ValueError):
    """Parameters violate an invariant (e.g. m > n, gamma outside (0, 1))."""


class IndexOutOfRange(BSMError, IndexError):
    pass


class DimensionMismatch(BSMError, ValueError):
    pass


class LengthMismatch(BSMError, ValueError):
    pass


class StreamTruncated(BSMError, EOFError):
    pass


class FormatError(BSMError, ValueError):
    """A persisted file has bad magic, version or length."""


class IoError(BSMError, OSError):
    pass


class StorageExceeded(BSMError):
    """A recorder emitted more bits than its storage budget allows."""


class TooLargeToEnumerate(BSMError):
    pass


class EmptyPreimage(BSMError):
    """No random string is consistent with the decoder's view."""


class IdenticalMessages(BSMError, ValueError):
    pass


class UnknownSelector(BSMError, KeyError):
    pass
