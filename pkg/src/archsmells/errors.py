"""Exception hierarchy shared by all modules."""


class ArchSmellError(Exception):
    """Base class for data/validation errors (CLI exit code 2)."""


class MalformedViewError(ArchSmellError):
    pass


class EmptySampleError(ArchSmellError, ValueError):
    pass


class ConcernDataError(ArchSmellError):
    pass


class ParseError(ArchSmellError):
    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class ClusterConflictError(ParseError):
    pass


class DistributionError(ParseError):
    pass


class CoverageError(ArchSmellError):
    def __init__(self, missing):
        self.missing = sorted(missing)
        shown = ", ".join(self.missing[:20])
        more = "" if len(self.missing) <= 20 else f" (+{len(self.missing) - 20} more)"
        super().__init__(f"cluster map does not cover entities: {shown}{more}")


class BalancingError(ArchSmellError):
    pass


class DatasetError(ArchSmellError):
    pass
