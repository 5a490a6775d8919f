"""Mesh-based analysis pipelines around a plan-driven distributed 2D FFT."""

from .bridge import (
    AnalysisStage,
    BandpassStage,
    FftStage,
    ImageStage,
    PipelineSpec,
    RunReport,
    ScaleConfig,
    ScaleStage,
    SourceConfig,
    load_config,
    parse_config,
    run_pipeline,
    scale_field,
)
from .datagen import GenConfig, add_noise, radial_field
from .errors import (
    ConfigError,
    DimensionError,
    FieldKindError,
    LifecycleError,
    MissingArrayError,
    NameCollisionError,
    PipelineStageError,
    PlanStateError,
    RankError,
)
from .fft_core import Direction, Plan, destroy, dft_naive, execute, fft_1d, plan_dft_2d
from .fft_endpoint import FftConfig, RankMailbox, distributed_fft_2d, fft_execute
from .filters import BandpassConfig, bandpass, display_magnitude
from .grid import Field, FieldKind, Mesh, Slab, local_slab, make_mesh, to_complex
from .pgm import ImageConfig, ImageScaling, read_image, write_image

__version__ = "0.1.0"
