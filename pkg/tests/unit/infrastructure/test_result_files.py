import json

import numpy as np

from errssl.domain.graph import graph_from_weights
from errssl.domain.ports.results_sink import ResultsSinkPort
from errssl.infrastructure.adapters import ResultFiles
from errssl.infrastructure.adapters.result_files import dump_graph, read_coordinates
from errssl.models import LaplacianKind


def test_implements_port(tmp_path):
    assert isinstance(ResultFiles(tmp_path), ResultsSinkPort)


def test_records_are_sorted_json_lines(tmp_path):
    sink = ResultFiles(tmp_path / "run")
    sink.write_records(
        "results.jsonl",
        [
            {"seed": 1, "error": np.float64(0.25), "kind": LaplacianKind.SYMMETRIC},
            {"seed": 0, "error": 0.5, "ids": np.array([1, 2])},
        ],
    )
    lines = (tmp_path / "run" / "results.jsonl").read_text().splitlines()
    assert lines == sorted(lines)
    parsed = [json.loads(line) for line in lines]
    assert {"seed": 1, "error": 0.25, "kind": "symmetric-normalized"} in parsed
    assert {"seed": 0, "error": 0.5, "ids": [1, 2]} in parsed


def test_table_keeps_full_float_precision(tmp_path):
    sink = ResultFiles(tmp_path)
    sink.write_table("t.csv", ["a", "b"], [[1, 0.1 + 0.2], ["x", ""]])
    assert (tmp_path / "t.csv").read_text() == "a,b\n1,0.30000000000000004\nx,\n"


def test_coordinates_read_back_exactly(tmp_path, rng):
    coords = rng.normal(size=(5, 2))
    labels = np.array([0, 1, 1, 0, 2])
    ResultFiles(tmp_path).write_coordinates("e.csv", coords, labels)
    header = (tmp_path / "e.csv").read_text().splitlines()[0]
    assert header == "x0,x1,label"
    read, read_labels = read_coordinates(tmp_path / "e.csv")
    assert np.array_equal(read, coords)
    assert np.array_equal(read_labels, labels)


def test_coordinates_without_labels(tmp_path):
    ResultFiles(tmp_path).write_coordinates("e.csv", np.array([1.0, 2.0]), None)
    coords, labels = read_coordinates(tmp_path / "e.csv")
    assert coords.shape == (2, 1)
    assert labels is None


def test_graph_dump_lists_upper_triangle(tmp_path):
    W = np.array([[0.0, 0.5, 0.0], [0.5, 0.0, 0.25], [0.0, 0.25, 0.0]])
    edges = dump_graph(graph_from_weights(W), tmp_path / "g" / "graph.txt")
    assert edges == 2
    assert (tmp_path / "g" / "graph.txt").read_text() == "0 1 0.5\n1 2 0.25\n"
