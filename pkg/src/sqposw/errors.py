"""Exception hierarchy. Every error raised by the package derives from PoswError."""


class PoswError(Exception):
    pass


class InvalidParams(PoswError, ValueError):
    pass


class InvalidDepth(InvalidParams):
    pass


class InvalidModulusSize(InvalidParams):
    pass


class GenerationTimeout(PoswError):
    pass


class ExternalModulusInvalid(InvalidParams):
    pass


class UnknownTag(PoswError, KeyError):
    pass


class CounterExhausted(PoswError):
    pass


class NotMember(PoswError):
    """The label does not divide the accumulated exponent."""


class LabelModulusCollision(PoswError):
    """A label shares a factor with the modulus, which factors the modulus."""


class LabelCollision(PoswError):
    pass


class InverseUndefined(PoswError, ArithmeticError):
    pass


class MalformedInput(PoswError, ValueError):
    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class VersionMismatch(MalformedInput):
    pass


class ParamsDigestMismatch(PoswError):
    pass


class ProtocolViolation(PoswError):
    pass


class SessionTimeout(PoswError):
    pass
