"""Exception hierarchy."""


class GrexpandError(Exception):
    """Base class for all library errors."""


class SpecMismatch(GrexpandError):
    """Operands live in different groups."""


class OutsideDomain(GrexpandError):
    """An index lies outside the index domain of a group."""


class NonTorsionGenerator(GrexpandError):
    """A generator of a would-be finite subgroup has infinite order."""


class CapExceeded(GrexpandError):
    """An enumeration would exceed the configured element cap."""


class IllDefined(GrexpandError):
    """A matrix does not induce a homomorphism on the quotient."""

    def __init__(self, i, j, condition):
        self.i = i
        self.j = j
        self.condition = condition
        super().__init__(f"entry ({i}, {j}) violates {condition}")


class IllDefinedTwist(GrexpandError):
    """A shift twist does not respect the moduli it connects."""

    def __init__(self, k, condition):
        self.k = k
        self.condition = condition
        super().__init__(f"twist at index {k} violates {condition}")


class NotAutomorphism(GrexpandError):
    pass


class NotInvariant(GrexpandError):
    """A subgroup is not mapped into itself."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class NotEpimorphism(GrexpandError):
    pass


class NotGenerator(GrexpandError):
    pass


class InvalidCertificate(GrexpandError):
    pass


class IntertwiningFails(GrexpandError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class ReindexClash(GrexpandError):
    """Two families cannot be merged into one admissible index set."""


class NonCompactDual(GrexpandError):
    """Duality is only computed for finite groups."""


class InvariantViolation(GrexpandError):
    """A structural invariant of a trajectory table failed."""
