"""Exception types raised across the pipeline.

``DataError`` subclasses map to CLI exit code 2, ``RemoteFailure`` subclasses
to exit code 3.
"""


class MispronError(Exception):
    pass


class DataError(MispronError):
    pass


class RemoteFailure(MispronError):
    pass


# textgrid
class MalformedTextGrid(DataError):
    pass


class TierNotFound(DataError):
    pass


class WordSequenceMismatch(DataError):
    pass


# audio
class UnsupportedFormat(DataError):
    pass


class CorruptContainer(DataError):
    pass


class EmptyBuffer(DataError):
    pass


class SpanOutOfRange(DataError):
    pass


# mfcc / dtw / distance
class BufferTooShort(DataError):
    pass


class EmptyMatrix(DataError):
    pass


class ZeroPeak(DataError):
    pass


# calibration / detector
class EmptyPool(DataError):
    pass


class DegeneratePool(DataError):
    pass


class MissingClassPools(DataError):
    pass


class MissingKde(DataError):
    pass


class ModelFormatError(DataError):
    pass


# metrics
class EmptyInput(DataError):
    pass


class EmptyGroup(DataError):
    pass


# clone provider
class CloneNotFound(DataError):
    pass


class CloneTimeout(RemoteFailure):
    pass


class RemoteError(RemoteFailure):
    def __init__(self, status: int, body: str):
        super().__init__(f"remote TTS returned {status}: {body[:200]}")
        self.status = status
        self.body = body


class BadPayload(RemoteFailure):
    pass


class ManifestError(DataError):
    pass
