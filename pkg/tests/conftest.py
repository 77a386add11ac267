import shutil

import pytest

from triquot.cli import main


@pytest.fixture(scope="session")
def conv_dir(tmp_path_factory):
    """A cache directory holding a calibrated convention, built once."""
    path = tmp_path_factory.mktemp("convdir")
    assert main(["calibrate", "--cache-dir", str(path)]) == 0
    return path


@pytest.fixture
def fresh_cache(conv_dir, tmp_path):
    """A per-test cache directory seeded with the calibrated convention."""
    cache = tmp_path / "cache"
    cache.mkdir()
    shutil.copy(conv_dir / "convention.json", cache / "convention.json")
    return cache
