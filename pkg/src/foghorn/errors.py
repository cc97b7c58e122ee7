"""Exception types shared across the foghorn modules."""


class FoghornError(Exception):
    """Base class for all foghorn errors."""


# --- grid bundles ---------------------------------------------------------

class BundleMalformed(FoghornError):
    pass


class PayloadSizeMismatch(FoghornError):
    pass


class TimeAxisInvalid(FoghornError):
    pass


class EmptyDomain(FoghornError):
    pass


class EmptyMask(FoghornError):
    pass


# --- classification -------------------------------------------------------

class ValueOutOfRange(FoghornError):
    pass


class UnknownWeatherCode(FoghornError):
    pass


class UnknownAttribute(FoghornError):
    pass


# --- bulletin grammar -----------------------------------------------------

class UnknownArea(FoghornError):
    pass


class ClauseSyntaxError(FoghornError):
    def __init__(self, attribute: str, span: str, message: str = ""):
        self.attribute = attribute
        self.span = span
        super().__init__(message or f"cannot parse {attribute} clause: {span!r}")


class ForecastStructureError(FoghornError):
    pass


class ValidationFailed(FoghornError):
    def __init__(self, violations):
        self.violations = list(violations)
        codes = ", ".join(v.code for v in self.violations)
        super().__init__(f"bulletin violates rules: {codes}")


# --- generation -----------------------------------------------------------

class MissingAttribute(FoghornError):
    pass


class DuplicateArea(FoghornError):
    pass


class EmptySynopsis(FoghornError):
    """No pressure system found; a valid 'nothing significant' outcome."""


# --- frames / corpus ------------------------------------------------------

class AspectRatioInvalid(FoghornError):
    pass


class DuplicateEntry(FoghornError):
    pass


# --- evaluation -----------------------------------------------------------

class EmptyEvaluation(FoghornError):
    pass


class AlignmentError(FoghornError):
    def __init__(self, orphans, message: str = ""):
        self.orphans = list(orphans)
        super().__init__(message or f"unaligned evaluation keys: {self.orphans[:5]}"
                                    f"{'...' if len(self.orphans) > 5 else ''}")


# --- inference gateway ----------------------------------------------------

class BackendUnavailable(FoghornError):
    pass


class MalformedResponse(FoghornError):
    pass


class UnknownBackend(FoghornError):
    pass
