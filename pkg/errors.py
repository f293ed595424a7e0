"""
Exception hierarchy shared by every diagcheck module
"""
from typing import List, Tuple


class DiagCheckError(Exception):
    """Base class for all diagcheck failures"""


class ArityError(DiagCheckError):
    """Tensor arities or shapes do not line up"""


class ShapeError(DiagCheckError):
    """Sequential composition of graphs or terms with mismatched boundaries"""


class InterpretationError(DiagCheckError):
    """A label has no tensor, or no tensor of the requested size"""


class TermTypeError(DiagCheckError):
    """Ill-formed term; position is the path of child indices to the offending node"""

    def __init__(self, message: str, position: Tuple[int, ...] = ()):
        super().__init__(message)
        self.position = tuple(position)


class UnknownGeneratorError(TermTypeError):
    pass


class GeneratorArityError(TermTypeError):
    pass


class ResolutionError(DiagCheckError):
    """A proof cites a rule or lemma that is not available"""


class TheorySyntaxError(DiagCheckError):
    """Theory source failed to lex, parse or resolve"""

    def __init__(self, diagnostics: List):
        self.diagnostics = list(diagnostics)
        super().__init__('\n'.join(str(d) for d in self.diagnostics))


class ModelCheckError(DiagCheckError):
    """A rule does not hold in the concrete model it ships with"""
