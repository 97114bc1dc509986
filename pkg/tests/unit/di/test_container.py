from errssl.config import RunConfig
from errssl.di.container import get_dataset_source, get_results_sink, get_settings
from errssl.domain.ports.dataset_source import DatasetSourcePort
from errssl.domain.ports.results_sink import ResultsSinkPort


def test_settings_reads_environment(monkeypatch):
    monkeypatch.setenv("DENSE_EIGEN_LIMIT", "800")
    monkeypatch.setenv("LOG_LEVEL", "trace")
    settings = get_settings()
    assert settings.dense_eigen_limit == 800
    assert settings.log_level == "DEBUG"


def test_dataset_source_follows_run_config(tmp_path):
    path = tmp_path / "pts.txt"
    path.write_text("1 1:0.5\n0 2:1.5\n")
    config = RunConfig(command="classify", data_format="libsvm")
    source = get_dataset_source(config)
    assert isinstance(source, DatasetSourcePort)
    assert source.load_dataset(str(path)).d == 2


def test_default_dataset_source():
    assert isinstance(get_dataset_source(), DatasetSourcePort)


def test_results_sink_targets_directory(tmp_path):
    sink = get_results_sink(tmp_path / "out")
    assert isinstance(sink, ResultsSinkPort)
    sink.write_text("note.txt", "ok\n")
    assert (tmp_path / "out" / "note.txt").read_text() == "ok\n"
