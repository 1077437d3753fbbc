"""Artifact I/O: atomic file writes, run manifests, and tabular formats.

All tabular outputs are CSV with headers; manifests and parameter files are
keyed text (``key = value`` lines, sorted) so runs can be diffed and hashed.
"""

from __future__ import annotations

import csv
import hashlib
import io
import os
import tempfile
import warnings
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import SchemaError
from .flight_data import (
    AbstractionClass,
    FeatureCategory,
    FeatureDescriptor,
    FeatureMatrix,
    descriptor_for,
)

FLOAT_FORMAT = "%.17g"  # round-trips float64 exactly


def format_float(value: float) -> str:
    return FLOAT_FORMAT % value


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    atomic_write_text(path, buffer.getvalue())


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(path, entries: Mapping[str, object]) -> None:
    """Sorted ``key = value`` lines; values are stringified verbatim."""
    lines = [f"{key} = {entries[key]}" for key in sorted(entries)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_manifest(path) -> dict[str, str]:
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition(" = ")
            entries[key] = value
    return entries


def write_feature_matrix_csv(matrix: FeatureMatrix, path) -> None:
    header = ("row_id",) + matrix.feature_names
    rows = (
        [matrix.row_ids[i]] + [format_float(v) for v in matrix.values[i]]
        for i in range(matrix.n_rows)
    )
    atomic_write_csv(path, header, rows)


def read_feature_matrix_csv(path) -> FeatureMatrix:
    """Read a feature-matrix CSV, resolving descriptors from the taxonomy.

    Columns with names outside the built-in taxonomy are classified as
    epistemic continuous features with a warning.
    """
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty") from None
        if not header or header[0] != "row_id":
            raise SchemaError(f"{path}: first column must be row_id")
        names = header[1:]
        row_ids: list[str] = []
        data: list[list[float]] = []
        for row in reader:
            row_ids.append(row[0])
            data.append([float(cell) for cell in row[1:]])

    descriptors = []
    unknown = []
    for name in names:
        descriptor = descriptor_for(name)
        if descriptor is None:
            unknown.append(name)
            descriptor = FeatureDescriptor(
                name, AbstractionClass.EPISTEMIC, FeatureCategory.CONTINUOUS
            )
        descriptors.append(descriptor)
    if unknown:
        warnings.warn(f"no taxonomy entry for columns {unknown}; treated as "
                      "epistemic continuous", stacklevel=2)

    return FeatureMatrix(
        values=np.array(data) if data else np.empty((0, len(names))),
        descriptors=tuple(descriptors),
        row_ids=tuple(row_ids),
    )


def write_labels_csv(row_ids: Sequence[str], labels: Sequence[str], path) -> None:
    atomic_write_csv(path, ("row_id", "label"), zip(row_ids, labels))


def read_labels_csv(path) -> dict[str, str]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["row_id", "label"]:
            raise SchemaError(f"{path}: expected header row_id,label")
        return {row[0]: row[1] for row in reader}
