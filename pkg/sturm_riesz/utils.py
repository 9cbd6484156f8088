import csv
import re
from pathlib import Path
from typing import Any, Iterable, Sequence

PRINT_PRECISION = 12
INDEX_LIST_PATTERN = r"^\s*(\d+\s*(,\s*\d+\s*)*)?$"


class ComputationError(Exception):
    """Base class of every numerical failure (CLI exit code 2)."""


def parse_index_list(text: str) -> list[int]:
    """Parse a comma separated list of nonnegative integers

    Parameters:
    text: for instance "0,2" - an empty string gives an empty list

    Example:
    --------
    parse_index_list("1, 3,5") == [1, 3, 5]
    parse_index_list("") == []
    parse_index_list("1,a") ==> ValueError
    """
    if not re.match(INDEX_LIST_PATTERN, text):
        raise ValueError(f"Invalid index list: {text!r}")

    return [int(item) for item in text.split(",") if item.strip() != ""]


def format_cell(value: Any) -> str:
    """Format a CSV cell

    Floats are printed with a fixed precision so that identical inputs give
    byte-identical files; enums are printed by value.

    Example:
    --------
    format_cell(0.25) == "2.500000000000e-01"
    format_cell(3) == "3"
    format_cell(None) == ""
    """
    if value is None:
        return ""

    if isinstance(value, bool):
        return "true" if value else "false"

    if isinstance(value, float):
        return f"{value:.{PRINT_PRECISION}e}"

    if hasattr(value, "value"):
        return str(value.value)

    return str(value)


def write_csv(
    path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> None:
    """Write a CSV file with a single header row

    Parameters:
    path  : destination, parent directories are created
    header: column names
    rows  : one sequence of cells per row, cells formatted by `format_cell`
    """
    path.parent.mkdir(exist_ok=True, parents=True)

    with path.open("w", newline="") as file_descriptor:
        writer = csv.writer(file_descriptor, lineterminator="\n")
        writer.writerow(header)

        for row in rows:
            if len(row) != len(header):
                raise ValueError("Every CSV row must match the header length")

            writer.writerow([format_cell(cell) for cell in row])
