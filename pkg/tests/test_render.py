import pytest

from dslt_lab import __version__
from dslt_lab.render import Artifact, artifact_to_csv, header_line, read_artifact, write_artifact

SPEC = {"command": "bounds", "params": {"hurst": 0.5, "case": "lnd"}, "output": None, "format": "csv"}


def _artifact():
    return Artifact(
        columns=["m", "norm_sq", "converged", "slope"],
        rows=[
            {"m": 1, "norm_sq": 0.1, "converged": True, "slope": None},
            {"m": "total", "norm_sq": 1.0 / 3.0, "converged": False, "slope": 0.5},
        ],
    )


def test_header_line_carries_version_and_spec():
    line = header_line(SPEC)
    assert line.startswith(f"# dslt-lab {__version__} ")
    assert line.endswith('"params":{"case":"lnd","hurst":0.5}}')


def test_csv_cells():
    text = artifact_to_csv(SPEC, _artifact())
    lines = text.splitlines()
    assert lines[1] == "m,norm_sq,converged,slope"
    assert lines[2] == "1,0.1,true,"
    assert lines[3] == f"total,{1.0 / 3.0!r},false,0.5"


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_write_then_read(tmp_path, fmt):
    path = write_artifact(tmp_path / f"out.{fmt}", SPEC, _artifact(), fmt)
    spec, rows = read_artifact(path)
    assert spec == SPEC
    assert rows == _artifact().rows


def test_read_artifact_needs_header(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError, match="missing dslt-lab header"):
        read_artifact(path)
