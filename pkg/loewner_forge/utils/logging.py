"""
Logging Helpers
---------------
Formatting helpers for log messages.
"""

from typing import Sequence, Union


def collapse_num_list(num_list: Union[Sequence[int], Sequence[float]]) -> str:
    """
    Produce representation for a list of numbers while collapsing large lists.

    For lists with 10 or fewer items return the representation of the list.
    Otherwise, return a string with the minimum and maximum items as well as the number of items.
    """
    num_list = [float(x) if not isinstance(x, int) else x for x in num_list]
    if len(num_list) > 10:
        return f"{min(num_list):.6g} .. {max(num_list):.6g} ({len(num_list)} items)"
    else:
        return repr(num_list)
