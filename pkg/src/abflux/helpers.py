"""
Shared helper functions for abflux.

JSON responses for the HTTP surface and the plain-text writers used by the CLI.
"""

import contextlib
import sys
from collections.abc import Iterable, Iterator, Sequence
from typing import IO, Any

import pandas as pd
from flask import jsonify

FLOAT_FORMAT = "%.17g"

# =============================================================================
# JSON Response Helpers
# =============================================================================


def json_error(message: str, status_code: int = 400):
    """Create a JSON error response.

    Args:
        message: Error message to return
        status_code: HTTP status code (default 400)

    Returns:
        Tuple of (response, status_code)
    """
    return jsonify({"status": "error", "message": message}), status_code


def json_success(message: str, **kwargs):
    """Create a JSON success response.

    Args:
        message: Success message to return
        **kwargs: Additional data to include in response

    Returns:
        JSON response object
    """
    payload = {"status": "success", "message": message}
    payload.update(kwargs)
    return jsonify(payload)


# =============================================================================
# Number Formatting
# =============================================================================


def complex_pair(z: complex) -> list[float]:
    """Split a complex number into [re, im] for JSON."""
    z = complex(z)
    return [z.real, z.imag]


# =============================================================================
# Output Helpers
# =============================================================================


def write_csv(
    rows: Iterable[Sequence[Any]],
    header: Sequence[str],
    stream: IO[str],
    comments: Sequence[str] = (),
) -> None:
    """Write '#' comment lines followed by the rows as a CSV table.

    Floats carry 17 significant digits so they parse back to the same double.
    Missing values (None) become empty fields.
    """
    for comment in comments:
        stream.write(f"# {comment}\n")
    frame = pd.DataFrame(list(rows), columns=list(header))
    frame.to_csv(stream, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")


@contextlib.contextmanager
def open_output(path: str | None) -> Iterator[IO[str]]:
    """Yield stdout for None or "-", otherwise a text file opened for writing."""
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as handle:
        yield handle
