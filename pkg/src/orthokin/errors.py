"""Exception hierarchy shared by all orthokin modules."""


class OrthokinError(Exception):
    """Base class for every error raised by this package."""


class InvalidDesign(OrthokinError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid machine definition: " + "; ".join(self.problems))


class Unreachable(OrthokinError):
    """The point lies outside the cylinder of reach of leg ``leg`` (numbered from 1)."""

    def __init__(self, leg: int, excess: float = float("nan")):
        self.leg = leg
        self.excess = excess
        super().__init__(f"point unreachable by leg {leg} (r - L = {excess:.3g})")


class NoAssembly(OrthokinError):
    pass


class InconsistentConfiguration(OrthokinError):
    pass


class AtSingularity(OrthokinError):
    pass


class AtParallelSingularity(AtSingularity):
    pass


class AtSerialSingularity(AtSingularity):
    pass


class InfiniteCondition(OrthokinError):
    pass


class OffsetOutOfBounds(OrthokinError):
    pass


class DegenerateSpec(OrthokinError):
    pass
