"""Exception hierarchy shared by all semparse modules."""


class SemparseError(Exception):
    pass


# grammar loading

class GrammarError(SemparseError):
    pass


class GrammarSyntaxError(GrammarError, SyntaxError):
    def __init__(self, msg, lineno=None):
        super().__init__(msg)
        self.msg = msg
        self.lineno = lineno

    def __str__(self):
        if self.lineno is None:
            return self.msg
        return f"line {self.lineno}: {self.msg}"


class DuplicateConstructor(GrammarError):
    pass


class DuplicateType(GrammarError):
    pass


class UnknownRootType(GrammarError):
    pass


class PrimitiveTypeQuery(GrammarError):
    pass


class UnknownType(GrammarError):
    pass


# trees

class ForeignConstructor(SemparseError):
    pass


class NonTerminatingGrammar(SemparseError):
    pass


class InvalidTree(SemparseError):
    pass


# transition system

class IllegalAction(SemparseError):
    def __init__(self, msg, rule=None, index=None):
        super().__init__(msg)
        self.rule = rule
        self.index = index


class CompleteHypothesis(SemparseError):
    pass


class IncompleteSequence(SemparseError):
    pass


class TrailingActions(SemparseError):
    pass


# converters

class ConversionError(SemparseError):
    def __init__(self, msg, lines=()):
        super().__init__(msg)
        self.lines = list(lines)


class UnbalancedParens(ConversionError):
    pass


class UnknownForm(ConversionError):
    pass


class UnknownColumn(ConversionError):
    pass


class UnsupportedSyntax(ConversionError):
    pass


class ColumnIndexOutOfRange(ConversionError):
    pass


class UnsupportedConstruct(ConversionError):
    pass


# model

class ShapeMismatch(SemparseError):
    pass


class MissingTable(SemparseError):
    pass


class IllegalOracle(SemparseError):
    pass


class ConversionFailure(SemparseError):
    def __init__(self, msg, failures=()):
        super().__init__(msg)
        self.failures = list(failures)


class CheckpointMismatch(SemparseError):
    pass


# datasets

class DatasetError(SemparseError):
    pass


class ParseError(DatasetError):
    def __init__(self, msg, lineno=None):
        super().__init__(f"line {lineno}: {msg}" if lineno else msg)
        self.lineno = lineno
