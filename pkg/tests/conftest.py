import csv
import json
import pytest
from pathlib import Path
from imslab.domain import OPERATING_POINT, REQUIRED_NAMES


@pytest.fixture
def operating_point():
    return OPERATING_POINT


@pytest.fixture
def params_file(tmp_path):
    '''the evaluation operating point as a parameter file, t_nar/t_np/t_par left to their defaults'''
    path = tmp_path / 'operating_point.json'
    path.write_text(json.dumps({name: getattr(OPERATING_POINT, name) for name in REQUIRED_NAMES}))
    return path


def write_params(tmp_path: Path, name: str = 'custom.json', **overrides) -> Path:
    data = {name_: getattr(OPERATING_POINT, name_) for name_ in REQUIRED_NAMES}
    data.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def read_rows(path: Path):
    '''data rows of an imslab csv, comment lines skipped'''
    with open(path, newline='') as stream:
        lines = [line for line in stream if not line.startswith('#')]
    return list(csv.DictReader(lines))
