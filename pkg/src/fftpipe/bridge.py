"""Pipeline orchestration: stage lifecycle, XML configuration, and the driver.

A pipeline is an ordered chain of analysis stages fed by a synthetic data
source. Stages receive a mesh, return a mesh, and follow a strict
initialize / execute / finalize lifecycle. Configuration is an XML document

    <sensei>
      <analysis type="fft" mesh="mesh" array="dataArray"
                direction="FFTW_FORWARD" python_xml="downstream.xml"/>
      ...
    </sensei>

with one ``analysis`` element per stage, executed in document order. A
``python_xml`` attribute chains in another config file: its stages are
parsed and spliced in right after the carrying stage. A ``datagen`` element
configures the data source instead of adding a stage; without one the
source defaults to a noisy 200x200 radial field named "dataArray" on mesh
"mesh".
"""

from __future__ import annotations

import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from pathlib import Path

from .datagen import GenConfig, add_noise, radial_field
from .errors import ConfigError, LifecycleError, PipelineStageError
from .fft_core import Direction
from .fft_endpoint import FftConfig, fft_execute
from .filters import BandpassConfig, bandpass
from .grid import Field, Mesh
from .pgm import ImageConfig, ImageScaling, write_image


@dataclass(frozen=True)
class ScaleConfig:
    array_name: str
    factor: float


def scale_field(mesh: Mesh, config: ScaleConfig) -> Mesh:
    """Multiply every value of the named field by `config.factor`."""
    target = mesh.get_field(config.array_name)
    return mesh.with_field(Field(target.name, target.values * config.factor))


@dataclass(frozen=True)
class SourceConfig:
    """The data source feeding the chain: generator settings plus naming."""

    gen: GenConfig = GenConfig()
    mesh_name: str = "mesh"
    array_name: str = "dataArray"

    def make_mesh(self) -> Mesh:
        noisy = add_noise(radial_field(self.gen, name=self.array_name), self.gen)
        return Mesh(self.mesh_name, self.gen.ny0, self.gen.ny1).add_field(noisy)


@dataclass(frozen=True)
class RunContext:
    out_dir: Path
    step: int


class AnalysisStage:
    """Base class enforcing the initialize -> execute* -> finalize lifecycle.

    Subclasses implement ``run`` (and optionally ``on_initialize`` /
    ``on_finalize``). ``execute`` is legal only between initialize and
    finalize; finalize runs exactly once. A stage that writes a file
    records it in ``artifact`` for the run report.
    """

    kind: str = "custom"

    CREATED = "created"
    INITIALIZED = "initialized"
    FINALIZED = "finalized"

    def __init__(self) -> None:
        self._state = AnalysisStage.CREATED
        self.artifact: Path | None = None

    @property
    def state(self) -> str:
        return self._state

    def initialize(self) -> None:
        if self._state != AnalysisStage.CREATED:
            raise LifecycleError(f"{self.kind} stage initialized twice")
        self.on_initialize()
        self._state = AnalysisStage.INITIALIZED

    def execute(self, mesh: Mesh, ctx: RunContext) -> Mesh:
        if self._state != AnalysisStage.INITIALIZED:
            raise LifecycleError(
                f"{self.kind} stage executed while {self._state}; "
                "execute is only legal between initialize and finalize"
            )
        self.artifact = None
        return self.run(mesh, ctx)

    def finalize(self) -> None:
        if self._state == AnalysisStage.FINALIZED:
            raise LifecycleError(f"{self.kind} stage finalized twice")
        if self._state != AnalysisStage.INITIALIZED:
            raise LifecycleError(f"{self.kind} stage finalized before initialize")
        self.on_finalize()
        self._state = AnalysisStage.FINALIZED

    def on_initialize(self) -> None:
        pass

    def run(self, mesh: Mesh, ctx: RunContext) -> Mesh:
        raise NotImplementedError

    def on_finalize(self) -> None:
        pass


class FftStage(AnalysisStage):
    kind = "fft"

    def __init__(self, config: FftConfig) -> None:
        super().__init__()
        self.config = config

    def run(self, mesh: Mesh, ctx: RunContext) -> Mesh:
        return fft_execute(mesh, self.config)


class BandpassStage(AnalysisStage):
    kind = "bandpass"

    def __init__(self, config: BandpassConfig) -> None:
        super().__init__()
        self.config = config

    def run(self, mesh: Mesh, ctx: RunContext) -> Mesh:
        return bandpass(mesh, self.config)


class ScaleStage(AnalysisStage):
    kind = "scale"

    def __init__(self, config: ScaleConfig) -> None:
        super().__init__()
        self.config = config

    def run(self, mesh: Mesh, ctx: RunContext) -> Mesh:
        return scale_field(mesh, self.config)


class ImageStage(AnalysisStage):
    kind = "image"

    def __init__(self, config: ImageConfig) -> None:
        super().__init__()
        self.config = config

    def run(self, mesh: Mesh, ctx: RunContext) -> Mesh:
        # relative paths land under the run's output directory
        target = Path(self.config.path)
        if not target.is_absolute():
            target = ctx.out_dir / target
        self.artifact = write_image(mesh, replace(self.config, path=str(target)))
        return mesh


@dataclass(frozen=True)
class PipelineSpec:
    source: SourceConfig
    stages: tuple[AnalysisStage, ...]

    def __post_init__(self) -> None:
        if not self.stages:
            raise ConfigError("pipeline has no stages")


# --- XML parsing -----------------------------------------------------------

_DIRECTIONS = {
    "FFTW_FORWARD": Direction.FORWARD,
    "FFTW_BACKWARD": Direction.BACKWARD,
}


def _require(el: ET.Element, attr: str, index: int, kind: str) -> str:
    value = el.get(attr)
    if value is None:
        raise ConfigError(f"analysis stage {index} ({kind}): missing required attribute '{attr}'")
    return value


def _number(value: str, attr: str, index: int, cast):
    try:
        return cast(value)
    except ValueError:
        raise ConfigError(
            f"analysis stage {index}: attribute '{attr}' has invalid value '{value}'"
        ) from None


class _ParseState:
    def __init__(self) -> None:
        self.stages: list[AnalysisStage] = []
        self.source: SourceConfig | None = None
        self.include_stack: list[Path] = []


def parse_config(xml_text: str, base_dir: str | Path = ".") -> PipelineSpec:
    """Parse a pipeline configuration document into a runnable spec.

    ``base_dir`` anchors relative ``python_xml`` include paths. Malformed XML
    raises xml.etree.ElementTree.ParseError (with position); semantic
    problems raise ConfigError; unreadable includes raise OSError.
    """
    state = _ParseState()
    _parse_document(xml_text, Path(base_dir), state)
    if not state.stages:
        raise ConfigError("configuration defines no stages")
    return PipelineSpec(source=state.source or SourceConfig(), stages=tuple(state.stages))


def load_config(path: str | Path) -> PipelineSpec:
    """Read and parse a configuration file; includes resolve next to it."""
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), base_dir=path.parent)


def _parse_document(xml_text: str, base_dir: Path, state: _ParseState) -> None:
    root = ET.fromstring(xml_text)
    if root.tag != "sensei":
        raise ConfigError(f"root element must be <sensei>, got <{root.tag}>")
    for el in root:
        if el.tag != "analysis":
            raise ConfigError(f"unexpected element <{el.tag}>; only <analysis> is allowed")
        _parse_stage(el, base_dir, state)


def _parse_stage(el: ET.Element, base_dir: Path, state: _ParseState) -> None:
    index = len(state.stages)
    stage_type = el.get("type")
    if stage_type is None:
        raise ConfigError(f"analysis stage {index}: missing required attribute 'type'")

    if stage_type == "datagen":
        if state.source is not None:
            raise ConfigError("configuration defines more than one datagen source")
        state.source = _parse_source(el, index)
    elif stage_type == "fft":
        direction_text = _require(el, "direction", index, "fft")
        if direction_text not in _DIRECTIONS:
            raise ConfigError(
                f"analysis stage {index} (fft): unknown direction '{direction_text}'"
            )
        ranks = _number(el.get("ranks", "1"), "ranks", index, int)
        state.stages.append(
            FftStage(
                FftConfig(
                    mesh_name=_require(el, "mesh", index, "fft"),
                    array_name=_require(el, "array", index, "fft"),
                    direction=_DIRECTIONS[direction_text],
                    ranks=ranks,
                    downstream_config=el.get("python_xml"),
                )
            )
        )
    elif stage_type == "bandpass":
        state.stages.append(
            BandpassStage(
                BandpassConfig(
                    mesh_name=_require(el, "mesh", index, "bandpass"),
                    array_name=_require(el, "array", index, "bandpass"),
                    keep_fraction=_number(
                        el.get("keep_fraction", "0.0075"), "keep_fraction", index, float
                    ),
                )
            )
        )
    elif stage_type == "scale":
        state.stages.append(
            ScaleStage(
                ScaleConfig(
                    array_name=_require(el, "array", index, "scale"),
                    factor=_number(_require(el, "factor", index, "scale"), "factor", index, float),
                )
            )
        )
    elif stage_type == "image":
        scaling_text = el.get("scaling", "linear")
        try:
            scaling = ImageScaling(scaling_text)
        except ValueError:
            raise ConfigError(
                f"analysis stage {index} (image): unknown scaling '{scaling_text}'"
            ) from None
        state.stages.append(
            ImageStage(
                ImageConfig(
                    mesh_name=_require(el, "mesh", index, "image"),
                    array_name=_require(el, "array", index, "image"),
                    path=_require(el, "path", index, "image"),
                    scaling=scaling,
                )
            )
        )
    else:
        raise ConfigError(f"analysis stage {index}: unknown analysis type '{stage_type}'")

    include = el.get("python_xml")
    if include is not None:
        _parse_include(include, base_dir, state)


def _parse_include(include: str, base_dir: Path, state: _ParseState) -> None:
    path = (base_dir / include).resolve()
    if path in state.include_stack:
        raise ConfigError(f"configuration include cycle at '{include}'")
    text = path.read_text(encoding="utf-8")
    state.include_stack.append(path)
    try:
        _parse_document(text, path.parent, state)
    finally:
        state.include_stack.pop()


def _parse_source(el: ET.Element, index: int) -> SourceConfig:
    def opt(attr: str, cast, default):
        raw = el.get(attr)
        return default if raw is None else _number(raw, attr, index, cast)

    gen = GenConfig(
        ny0=opt("ny0", int, 200),
        ny1=opt("ny1", int, 200),
        noise_fraction=opt("noise_fraction", float, 0.5),
        noise_amplitude=opt("noise_amplitude", float, None),
        seed=opt("seed", int, 0),
        wavelength=opt("wavelength", float, None),
    )
    return SourceConfig(
        gen=gen,
        mesh_name=el.get("mesh", "mesh"),
        array_name=el.get("array", "dataArray"),
    )


# --- driver ----------------------------------------------------------------


@dataclass(frozen=True)
class RunRecord:
    step: int
    stage_index: int
    kind: str
    millis: float
    artifact: Path | None


@dataclass(frozen=True)
class RunReport:
    records: tuple[RunRecord, ...] = field(default_factory=tuple)


def run_pipeline(spec: PipelineSpec, steps: int, out_dir: str | Path) -> RunReport:
    """Drive the chain: initialize every stage once, execute them in order
    for each step, finalize once at the end.

    Emits one report line per stage per step on stdout:
    ``step=<i> stage=<k> kind=<kind> ms=<float> out=<path|->``. A stage
    failure aborts the run (after finalizing the stages already
    initialized) with a PipelineStageError naming stage index and kind.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    records: list[RunRecord] = []
    initialized: list[AnalysisStage] = []
    error: PipelineStageError | None = None
    try:
        for k, stage in enumerate(spec.stages):
            try:
                stage.initialize()
            except Exception as exc:
                raise PipelineStageError(k, stage.kind, str(exc)) from exc
            initialized.append(stage)
        for step in range(steps):
            mesh = spec.source.make_mesh()
            for k, stage in enumerate(spec.stages):
                started = time.perf_counter()
                try:
                    mesh = stage.execute(mesh, RunContext(out_dir=out_dir, step=step))
                except Exception as exc:
                    raise PipelineStageError(k, stage.kind, str(exc)) from exc
                millis = (time.perf_counter() - started) * 1000.0
                record = RunRecord(step, k, stage.kind, millis, stage.artifact)
                records.append(record)
                print(
                    f"step={record.step} stage={record.stage_index} "
                    f"kind={record.kind} ms={record.millis:.3f} "
                    f"out={record.artifact if record.artifact is not None else '-'}"
                )
    except PipelineStageError as exc:
        error = exc
    for stage in initialized:
        try:
            stage.finalize()
        except Exception as exc:  # keep the first failure, whatever it was
            if error is None:
                error = PipelineStageError(
                    spec.stages.index(stage), stage.kind, f"finalize failed: {exc}"
                )
                error.__cause__ = exc
    if error is not None:
        raise error
    return RunReport(records=tuple(records))
