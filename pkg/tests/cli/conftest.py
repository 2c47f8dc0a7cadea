import pytest

from loewner_forge.cli.__main__ import build_parser, main


@pytest.fixture
def run_cli(tmp_path, monkeypatch):
    """
    Return a function running the command line in a temporary directory and returning the exit status.
    """
    monkeypatch.chdir(tmp_path)

    def inner(*argv: str) -> int:
        return main(build_parser().parse_args([str(arg) for arg in argv]))

    return inner
