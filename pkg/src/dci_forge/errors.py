class NoExtension(Exception):
    """A subgroup isomorphism has no extension to an automorphism of G."""


class CapExceeded(Exception):
    """A group order or materialisation exceeded its configured cap."""

    def __init__(self, what, size, cap):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.size = size
        self.cap = cap


class BudgetExceeded(Exception):
    """The shared work-unit budget ran out."""


class InvalidConstruction(ValueError):
    def __init__(self, failures):
        if isinstance(failures, str):
            failures = [failures]
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))


class OutOfRange(ValueError):
    """No explicit construction covers the requested parameters."""


class VerificationFailed(AssertionError):
    def __init__(self, condition, detail=""):
        self.condition = condition
        super().__init__(f"{condition}: {detail}" if detail else condition)
