import runpy
from pathlib import Path

import pytest

PROJECT_ROOT_DIR = Path(__file__).parent.parent.parent
TUTORIAL_PY_FILES = sorted((PROJECT_ROOT_DIR / "tutorials").glob("./**/*.py"))


@pytest.mark.parametrize(
    "tutorial_py_file", TUTORIAL_PY_FILES, ids=[str(path.relative_to(PROJECT_ROOT_DIR)) for path in TUTORIAL_PY_FILES]
)
@pytest.mark.slow
@pytest.mark.no_coverage
def test_tutorials(tutorial_py_file, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    runpy.run_path(str(tutorial_py_file), run_name="__main__")
