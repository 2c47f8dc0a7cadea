import pytest

from loewner_forge.utils.logging import collapse_num_list


@pytest.mark.parametrize(
    ["num_list", "expected"],
    [
        ([], "[]"),
        ([1, 2, 3], "[1, 2, 3]"),
        ([0.5, 2], "[0.5, 2]"),
        (list(range(11)), "0 .. 10 (11 items)"),
        ([0.125 * k for k in range(20)], "0 .. 2.375 (20 items)"),
    ],
)
def test_collapse_num_list(num_list, expected):
    assert collapse_num_list(num_list) == expected
