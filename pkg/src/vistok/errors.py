"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`VistokError`,
and each one carries the CLI exit code it maps to.  Validation problems exit
with 1, filesystem problems with 2.
"""


class VistokError(Exception):
    exit_code = 1


class AtlasError(VistokError):
    """Malformed or inconsistent glyph atlas."""


class ConfigError(VistokError):
    """RenderConfig invariants violated."""


class GlyphOverflow(VistokError):
    """A glyph bitmap is taller than the strip it is drawn into."""


class DimensionMismatch(VistokError):
    """Image sides are not multiples of the patch size."""


class SchemaError(VistokError):
    """Tokenizer file does not follow the documented schema."""


class MergeConsistencyError(VistokError):
    """A merge refers to an unknown token, or a pair is listed twice."""


class MissingDictionary(VistokError):
    """Dictionary-based segmentation requested without a dictionary."""


class EmptyCorpus(VistokError):
    pass


class ZeroVector(VistokError):
    pass


class LexiconError(VistokError):
    pass


class ShapeMismatch(VistokError):
    pass


class MatrixFormatError(VistokError):
    pass


class ParseError(VistokError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateId(VistokError):
    pass


class IoError(VistokError):
    exit_code = 2
