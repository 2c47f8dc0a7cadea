from typing import List

import dotenv
import pytest


def _test(coverage: bool = False, quick: bool = False, allow_skip: str = "all") -> int:
    """
    Run toolkit tests, located in `tests/` dir, using env defined in `.env_file`.
    Please keep in mind that slow tests grow full ensembles and may take several minutes each.

    :param coverage: Enable coverage calculation
    :param quick: Deselect 'slow' marked tests
    :param allow_skip: Marks of the tests that are allowed to skip; `none` forbids skipping.
    """
    test_coverage_threshold = 90

    dotenv.load_dotenv(".env_file")
    args: List[str] = [f"--allow-skip={allow_skip}", "tests/"]

    if quick:
        args = ["-m", "not slow", *args]

    if coverage:
        args = [
            "-m",
            "not no_coverage",
            f"--cov-fail-under={test_coverage_threshold}",
            "--cov-report",
            "html",
            "--cov-report",
            "term",
            "--cov=loewner_forge",
            *args,
        ]
    else:
        args = [
            "--tb=long",
            "-vv",
            "--cache-clear",
            *args,
        ]

    return pytest.main(args)


def quick_test():
    exit(_test(quick=True))


def quick_test_coverage():
    exit(_test(coverage=True, quick=True))


def test_no_cov():
    exit(_test())


def test_all():
    exit(_test(coverage=True, allow_skip="none"))
