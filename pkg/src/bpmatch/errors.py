"""Exception hierarchy shared by all bpmatch modules."""


class BpMatchError(Exception):
    """Base class for every error raised by this package."""


class InversionOfZero(BpMatchError, ZeroDivisionError):
    pass


class PointNotOnCurve(BpMatchError, ValueError):
    pass


class UnsupportedCurveForSampling(BpMatchError, ValueError):
    pass


class KeyGenExhausted(BpMatchError):
    pass


class BadRandomizer(BpMatchError, ValueError):
    pass


class PlaintextOutOfWindow(BpMatchError):
    pass


class DlogNotFound(BpMatchError):
    pass


class MalformedCiphertext(BpMatchError, ValueError):
    pass


class CodecError(BpMatchError, ValueError):
    pass


class ShareOutOfRange(BpMatchError, ValueError):
    pass


class NoCandidates(BpMatchError, ValueError):
    pass


class ProtocolAbort(BpMatchError):
    """A BP run stopped early.

    ``reason`` names the underlying failure class (``"PlaintextOutOfWindow"``,
    ``"Codec"``, ...); the original exception is chained as ``__cause__``.
    """

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}" if detail else reason)
