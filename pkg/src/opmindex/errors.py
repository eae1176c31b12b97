"""Exception hierarchy shared by all modules."""


class OpmError(Exception):
    """Base class for every error raised by opmindex."""


class InvalidParams(OpmError, ValueError):
    pass


class InvalidInput(OpmError, ValueError):
    pass


class CorruptComponent(OpmError, ValueError):
    """Order/delta components that cannot come from any sequence."""


class OutOfRange(OpmError, ValueError):
    """A value handed to a bounded coder does not fit the bound."""


class CorruptStream(OpmError, ValueError):
    """Bit stream exhausted or malformed while decoding a codeword."""


class CorruptBlock(OpmError, ValueError):
    """A compressed delta block failed to decode."""


class InvalidSymbol(OpmError, ValueError):
    pass


class PatternTooShort(OpmError, ValueError):
    """Indexed search needs patterns strictly longer than the window size q."""


class CorruptIndex(OpmError, ValueError):
    """An index container on disk is truncated, inconsistent or of the wrong version."""
