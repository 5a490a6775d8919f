"""Exception types shared across the package."""


class DimensionError(ValueError):
    """A grid, buffer, or transform size is invalid or inconsistent."""


class NameCollisionError(ValueError):
    """A field with the same name already exists on the mesh."""


class MissingArrayError(LookupError):
    """The requested array is not present on the mesh."""


class FieldKindError(TypeError):
    """A real field was supplied where a complex one is required, or vice versa."""


class RankError(ValueError):
    """A rank index or rank count is out of range."""


class PlanStateError(RuntimeError):
    """A destroyed plan was executed."""


class ConfigError(ValueError):
    """A pipeline configuration is malformed or inconsistent."""


class LifecycleError(RuntimeError):
    """A stage lifecycle method was called out of order."""


class PipelineStageError(RuntimeError):
    """A stage failed while the pipeline was running.

    Carries ``stage_index`` and ``kind`` so callers can report which stage
    aborted the run; the original exception is chained as ``__cause__``.
    """

    def __init__(self, stage_index: int, kind: str, message: str):
        super().__init__(f"stage {stage_index} ({kind}): {message}")
        self.stage_index = stage_index
        self.kind = kind
