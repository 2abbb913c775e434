"""Exception types shared across the pipeline."""


class PvlensError(Exception):
    """Base class for all pipeline errors."""


# --- label parsing ---

class MalformedXml(PvlensError):
    pass


class MissingSetId(PvlensError):
    pass


class DuplicateSection(PvlensError):
    pass


# --- terminology loading ---

class MissingFile(PvlensError):
    pass


class MalformedRow(PvlensError):
    def __init__(self, path, line_no, reason):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = path
        self.line_no = line_no
        self.reason = reason


class DanglingLlt(PvlensError):
    pass


class UnknownCode(PvlensError):
    pass


# --- matching ---

class EmptyDictionary(PvlensError):
    pass


class StoreMismatch(PvlensError):
    pass


# --- identifier mapping ---

class UnmappedLabel(PvlensError):
    pass


class MalformedNdc(PvlensError):
    pass


# --- SrLC ---

class MalformedRecord(PvlensError):
    def __init__(self, line_no, reason):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


# --- repository ---

class StorageFailure(PvlensError):
    pass


# --- metrics ---

class DegenerateCounts(PvlensError):
    pass


class UnpairedTerm(PvlensError):
    pass


class MissingAdjudication(PvlensError):
    pass


# --- review workflow ---

class PoolTooSmall(PvlensError):
    pass


class IncompleteDecisions(PvlensError):
    def __init__(self, missing_term_ids):
        super().__init__(f"missing verdicts for terms: {sorted(missing_term_ids)}")
        self.missing_term_ids = sorted(missing_term_ids)


class AlreadySubmitted(PvlensError):
    pass


class AlreadyAdjudicated(PvlensError):
    pass
