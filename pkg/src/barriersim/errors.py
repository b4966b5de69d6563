"""Exception types shared across the simulator.

Every class carries a stable ``code`` string so the gateway can report
machine-readable errors without string-matching messages.
"""


class SimError(Exception):
    code = "SIM_ERROR"


class DimensionMismatch(SimError):
    code = "DIMENSION_MISMATCH"


class EmptyPath(SimError):
    code = "EMPTY_PATH"


class Cancelled(SimError):
    code = "CANCELLED"


class Unreachable(SimError):
    code = "UNREACHABLE"


class InvalidDimensions(SimError):
    code = "INVALID_DIMENSIONS"


class UnknownBarrier(SimError):
    code = "UNKNOWN_BARRIER"


class PersonBarrierImmutable(SimError):
    code = "PERSON_BARRIER_IMMUTABLE"


class WrongPhase(SimError):
    code = "WRONG_PHASE"


class OutOfWorkspace(SimError):
    code = "OUT_OF_WORKSPACE"


class PlanningError(SimError):
    code = "PLANNING_ERROR"


class StartInvalid(PlanningError):
    code = "START_INVALID"


class GoalUnreachable(PlanningError):
    code = "GOAL_UNREACHABLE"


class GoalInCollision(PlanningError):
    code = "GOAL_IN_COLLISION"


class PlanningTimeout(PlanningError):
    code = "PLANNING_TIMEOUT"


class PlanningFailed(SimError):
    """Raised by lock-time chain planning; remembers which leg failed."""

    code = "PLANNING_FAILED"

    def __init__(self, index: int, cause: Exception):
        super().__init__(f"sub-path {index} failed to plan: {cause}")
        self.index = index
        self.cause = cause


class ScenarioInvalid(SimError):
    code = "SCENARIO_INVALID"


class ArmFileMissing(SimError):
    code = "ARM_FILE_MISSING"


class PortInUse(SimError):
    code = "PORT_IN_USE"


class SchemaError(SimError):
    """Malformed or type-invalid wire message."""

    code = "SCHEMA"


class SimSpeedRange(SimError):
    code = "SIM_SPEED_RANGE"
