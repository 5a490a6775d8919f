import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from fftpipe.bridge import (
    AnalysisStage,
    BandpassStage,
    FftStage,
    ImageStage,
    PipelineSpec,
    RunContext,
    ScaleConfig,
    ScaleStage,
    SourceConfig,
    load_config,
    parse_config,
    run_pipeline,
    scale_field,
)
from fftpipe.datagen import GenConfig
from fftpipe.errors import (
    ConfigError,
    LifecycleError,
    MissingArrayError,
    PipelineStageError,
)
from fftpipe.fft_core import Direction
from fftpipe.fft_endpoint import FftConfig
from fftpipe.filters import BandpassConfig
from fftpipe.grid import Field, Mesh
from fftpipe.pgm import ImageConfig

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

SAMPLE_FFT_XML = """<sensei>
  <analysis type="fft" mesh="mesh" array="dataArray" direction="FFTW_FORWARD"  python_xml="python_spectral_config.xml"/>
</sensei>
"""

DOWNSTREAM_XML = """<sensei>
  <analysis type="bandpass" mesh="mesh" array="dataArray" keep_fraction="0.0075"/>
</sensei>
"""


@pytest.fixture
def sample_dir(tmp_path):
    (tmp_path / "fft.xml").write_text(SAMPLE_FFT_XML)
    (tmp_path / "python_spectral_config.xml").write_text(DOWNSTREAM_XML)
    return tmp_path


class TestParseConfig:
    def test_sample_fft_document(self, sample_dir):
        spec = parse_config(SAMPLE_FFT_XML, base_dir=sample_dir)
        fft = spec.stages[0]
        assert isinstance(fft, FftStage)
        assert fft.config.mesh_name == "mesh"
        assert fft.config.array_name == "dataArray"
        assert fft.config.direction is Direction.FORWARD
        assert fft.config.downstream_config == "python_spectral_config.xml"
        # the chained file's stages follow immediately
        assert isinstance(spec.stages[1], BandpassStage)
        assert spec.stages[1].config.keep_fraction == 0.0075

    def test_default_source_when_no_datagen(self, sample_dir):
        spec = parse_config(SAMPLE_FFT_XML, base_dir=sample_dir)
        assert spec.source.mesh_name == "mesh"
        assert spec.source.array_name == "dataArray"
        assert (spec.source.gen.ny0, spec.source.gen.ny1) == (200, 200)

    def test_empty_document_rejected(self):
        with pytest.raises(ConfigError, match="no stages"):
            parse_config("<sensei></sensei>")

    def test_unknown_type_rejected(self):
        with pytest.raises(ConfigError, match="warp"):
            parse_config('<sensei><analysis type="warp"/></sensei>')

    @pytest.mark.parametrize("attr", ["type", "mesh", "array", "direction"])
    def test_dropped_attribute_is_named(self, attr):
        tree = ET.fromstring(SAMPLE_FFT_XML)
        el = tree.find("analysis")
        del el.attrib[attr]
        del el.attrib["python_xml"]  # keep the document self-contained
        with pytest.raises(ConfigError, match=attr):
            parse_config(ET.tostring(tree, encoding="unicode"))

    def test_malformed_xml_reports_position(self):
        with pytest.raises(ET.ParseError):
            parse_config("<sensei><analysis type='fft'></sensei>")

    def test_wrong_root_element(self):
        with pytest.raises(ConfigError):
            parse_config('<pipeline><analysis type="scale"/></pipeline>')

    def test_unknown_child_element(self):
        with pytest.raises(ConfigError):
            parse_config("<sensei><stage/></sensei>")

    def test_unknown_direction(self):
        with pytest.raises(ConfigError, match="SIDEWAYS"):
            parse_config(
                '<sensei><analysis type="fft" mesh="m" array="a" '
                'direction="FFTW_SIDEWAYS"/></sensei>'
            )

    def test_missing_include_file(self, tmp_path):
        xml = SAMPLE_FFT_XML
        with pytest.raises(OSError):
            parse_config(xml, base_dir=tmp_path)

    def test_include_cycle_rejected(self, tmp_path):
        (tmp_path / "loop.xml").write_text(
            '<sensei><analysis type="fft" mesh="m" array="a" '
            'direction="FFTW_FORWARD" python_xml="loop.xml"/></sensei>'
        )
        with pytest.raises(ConfigError, match="cycle"):
            load_config(tmp_path / "loop.xml")

    def test_datagen_configures_source(self):
        spec = parse_config(
            '<sensei>'
            '<analysis type="datagen" ny0="32" ny1="48" seed="7" noise_fraction="0.25"/>'
            '<analysis type="scale" array="dataArray" factor="2.0"/>'
            "</sensei>"
        )
        assert (spec.source.gen.ny0, spec.source.gen.ny1) == (32, 48)
        assert spec.source.gen.seed == 7
        assert spec.source.gen.noise_fraction == 0.25

    def test_duplicate_datagen_rejected(self):
        xml = (
            "<sensei>"
            '<analysis type="datagen"/>'
            '<analysis type="datagen"/>'
            '<analysis type="scale" array="a" factor="1"/>'
            "</sensei>"
        )
        with pytest.raises(ConfigError, match="datagen"):
            parse_config(xml)

    def test_invalid_numeric_attribute(self):
        with pytest.raises(ConfigError, match="factor"):
            parse_config('<sensei><analysis type="scale" array="a" factor="lots"/></sensei>')

    @pytest.mark.parametrize(
        "xml, attr",
        [
            ('<sensei><analysis type="bandpass" array="a"/></sensei>', "mesh"),
            ('<sensei><analysis type="bandpass" mesh="m"/></sensei>', "array"),
            ('<sensei><analysis type="scale" factor="1"/></sensei>', "array"),
            ('<sensei><analysis type="scale" array="a"/></sensei>', "factor"),
            ('<sensei><analysis type="image" array="a" path="p"/></sensei>', "mesh"),
            ('<sensei><analysis type="image" mesh="m" path="p"/></sensei>', "array"),
            ('<sensei><analysis type="image" mesh="m" array="a"/></sensei>', "path"),
        ],
    )
    def test_missing_attribute_named_for_every_kind(self, xml, attr):
        with pytest.raises(ConfigError, match=attr):
            parse_config(xml)

    def test_shipped_configs_parse(self):
        spec = load_config(CONFIG_DIR / "fft.xml")
        kinds = [s.kind for s in spec.stages]
        assert kinds == ["fft", "image", "bandpass", "image", "fft", "scale", "image"]
        demo = load_config(CONFIG_DIR / "demo.xml")
        assert [s.kind for s in demo.stages] == [
            "image", "fft", "image", "bandpass", "image", "fft", "scale", "image",
        ]
        assert demo.source.gen.seed == 42


class TestScaleField:
    def make_mesh(self):
        return Mesh("mesh", 2, 2).add_field(Field("a", [[1.0, 2.0], [3.0, 4.0]]))

    def test_factor_one_is_identity(self):
        mesh = self.make_mesh()
        out = scale_field(mesh, ScaleConfig("a", 1.0))
        np.testing.assert_array_equal(out.get_field("a").values, mesh.get_field("a").values)

    def test_factor_zero_blanks(self):
        out = scale_field(self.make_mesh(), ScaleConfig("a", 0.0))
        np.testing.assert_array_equal(out.get_field("a").values, np.zeros((2, 2)))

    def test_scales_complex_componentwise(self):
        mesh = Mesh("m", 1, 1).add_field(Field("z", [[2.0 + 4.0j]]))
        out = scale_field(mesh, ScaleConfig("z", 0.5))
        assert out.get_field("z").values[0, 0] == 1.0 + 2.0j

    def test_missing_array(self):
        with pytest.raises(MissingArrayError):
            scale_field(self.make_mesh(), ScaleConfig("nope", 1.0))


class RecordingStage(AnalysisStage):
    kind = "probe"

    def __init__(self, calls):
        super().__init__()
        self.calls = calls

    def on_initialize(self):
        self.calls.append("initialize")

    def run(self, mesh, ctx):
        self.calls.append("execute")
        return mesh

    def on_finalize(self):
        self.calls.append("finalize")


def tiny_source():
    return SourceConfig(gen=GenConfig(ny0=12, ny1=12, seed=3))


class TestLifecycle:
    def test_three_step_run_call_sequence(self, tmp_path, capsys):
        calls = []
        spec = PipelineSpec(source=tiny_source(), stages=(RecordingStage(calls),))
        run_pipeline(spec, steps=3, out_dir=tmp_path)
        assert calls == ["initialize", "execute", "execute", "execute", "finalize"]

    def test_execute_before_initialize(self):
        stage = RecordingStage([])
        with pytest.raises(LifecycleError):
            stage.execute(Mesh("m", 1, 1), RunContext(Path("."), 0))

    def test_execute_after_finalize(self):
        stage = RecordingStage([])
        stage.initialize()
        stage.finalize()
        with pytest.raises(LifecycleError):
            stage.execute(Mesh("m", 1, 1), RunContext(Path("."), 0))

    def test_finalize_twice(self):
        stage = RecordingStage([])
        stage.initialize()
        stage.finalize()
        with pytest.raises(LifecycleError):
            stage.finalize()

    def test_finalize_before_initialize(self):
        with pytest.raises(LifecycleError):
            RecordingStage([]).finalize()


def demo_stages(keep=0.05, ranks=1):
    n = 12 * 12
    return (
        ImageStage(ImageConfig("mesh", "dataArray", "01_noisy.pgm")),
        FftStage(FftConfig("mesh", "dataArray", Direction.FORWARD, ranks=ranks)),
        BandpassStage(BandpassConfig("mesh", "dataArray", keep)),
        FftStage(FftConfig("mesh", "dataArray", Direction.BACKWARD, ranks=ranks)),
        ScaleStage(ScaleConfig("dataArray", 1.0 / n)),
    )


class TestRunPipeline:
    def test_writes_images_and_reports(self, tmp_path, capsys):
        spec = PipelineSpec(source=tiny_source(), stages=demo_stages())
        report = run_pipeline(spec, steps=1, out_dir=tmp_path)
        assert (tmp_path / "01_noisy.pgm").exists()
        assert len(report.records) == 5
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 5
        assert lines[0].startswith("step=0 stage=0 kind=image ms=")
        assert lines[0].endswith("01_noisy.pgm")
        assert lines[1].startswith("step=0 stage=1 kind=fft ms=")
        assert lines[1].endswith("out=-")

    def test_single_image_stage_succeeds(self, tmp_path, capsys):
        spec = PipelineSpec(
            source=tiny_source(),
            stages=(ImageStage(ImageConfig("mesh", "dataArray", "only.pgm")),),
        )
        report = run_pipeline(spec, steps=1, out_dir=tmp_path)
        assert report.records[0].artifact == tmp_path / "only.pgm"

    def test_stage_error_names_index_and_kind(self, tmp_path, capsys):
        stages = (
            FftStage(FftConfig("mesh", "dataArray", Direction.FORWARD)),
            BandpassStage(BandpassConfig("mesh", "missingArray")),
        )
        spec = PipelineSpec(source=tiny_source(), stages=stages)
        with pytest.raises(PipelineStageError) as info:
            run_pipeline(spec, steps=1, out_dir=tmp_path)
        assert info.value.stage_index == 1
        assert info.value.kind == "bandpass"
        assert isinstance(info.value.__cause__, MissingArrayError)
        # initialized stages were still finalized
        assert all(s.state == AnalysisStage.FINALIZED for s in stages)

    def test_zero_steps_rejected(self, tmp_path):
        spec = PipelineSpec(source=tiny_source(), stages=demo_stages())
        with pytest.raises(ValueError):
            run_pipeline(spec, steps=0, out_dir=tmp_path)

    def test_empty_stage_list_rejected(self):
        with pytest.raises(ConfigError):
            PipelineSpec(source=tiny_source(), stages=())

    def test_deterministic_images(self, tmp_path, capsys):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run_pipeline(PipelineSpec(source=tiny_source(), stages=demo_stages()), 1, out1)
        run_pipeline(PipelineSpec(source=tiny_source(), stages=demo_stages()), 1, out2)
        assert (out1 / "01_noisy.pgm").read_bytes() == (out2 / "01_noisy.pgm").read_bytes()

    def test_multi_step_repeats_static_field(self, tmp_path, capsys):
        spec = PipelineSpec(source=tiny_source(), stages=demo_stages())
        report = run_pipeline(spec, steps=2, out_dir=tmp_path)
        assert len(report.records) == 10
        assert {r.step for r in report.records} == {0, 1}

    def test_run_from_shipped_demo_config(self, tmp_path, capsys):
        spec = load_config(CONFIG_DIR / "demo.xml")
        report = run_pipeline(spec, steps=1, out_dir=tmp_path)
        for name in ("01_noisy.pgm", "02_spectrum.pgm", "03_filtered.pgm", "04_denoised.pgm"):
            assert (tmp_path / name).exists()
        assert len(report.records) == 8
