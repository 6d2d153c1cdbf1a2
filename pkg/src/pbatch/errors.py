"""Exception hierarchy shared by the solver modules."""


class PBatchError(Exception):
    pass


class InstanceError(PBatchError, ValueError):
    pass


class EmptyInstance(InstanceError):
    pass


class NonPositive(InstanceError):
    def __init__(self, job_id, field):
        super().__init__(f"job {job_id}: {field} must be a positive integer")
        self.job_id = job_id
        self.field = field


class OversizedJob(InstanceError):
    def __init__(self, job_id, size, capacity):
        super().__init__(f"job {job_id}: size {size} exceeds capacity {capacity}")
        self.job_id = job_id


class ScheduleError(PBatchError, ValueError):
    pass


class NotAPartition(ScheduleError):
    pass


class CapacityViolation(ScheduleError):
    pass


class BrokenChain(ScheduleError):
    pass


class PartitionMismatch(ScheduleError):
    pass


class ForeignJob(PBatchError, ValueError):
    pass


class IndexOutOfRange(PBatchError, IndexError):
    pass


class LPError(PBatchError):
    pass


class Infeasible(LPError):
    pass


class NumericalFailure(LPError):
    pass


class TooLarge(PBatchError, ValueError):
    pass


class NonPositiveUb(PBatchError, ValueError):
    pass


class BadSigma(PBatchError, ValueError):
    pass


class ParseError(PBatchError, ValueError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line
