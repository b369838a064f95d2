import csv
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

from simulation.diagnostics import SCHEMA_VERSION, DiagnosticsRecord

SCHEMA_PREFIX = "# schema_version="


class TimeseriesWriter:
    """CSV of diagnostics rows behind a schema comment line and a header row."""

    def __init__(self, path: Union[str, Path], columns: Sequence[str]):
        self.path = Path(path)
        self.columns = list(columns)
        self._file = None
        self._writer = None

    def __enter__(self):
        self._file = open(self.path, "w", newline="")
        self._file.write(f"{SCHEMA_PREFIX}{SCHEMA_VERSION}\n")
        self._writer = csv.writer(self._file)
        self._writer.writerow(self.columns)
        return self

    def write(self, record: DiagnosticsRecord):
        self._writer.writerow([repr(float(v)) for v in record.as_row(self.columns)])
        self._file.flush()

    def __exit__(self, exc_type, exc, tb):
        if self._file is not None:
            self._file.close()
        return False


def read_timeseries(path: Union[str, Path]) -> Tuple[int, List[str], Dict[str, List[float]]]:
    with open(path, newline="") as f:
        first = f.readline()
        if not first.startswith(SCHEMA_PREFIX):
            raise ValueError(f"{path} does not start with a schema line")
        version = int(first[len(SCHEMA_PREFIX):])
        reader = csv.reader(f)
        columns = next(reader)
        data = {c: [] for c in columns}
        for row in reader:
            for c, v in zip(columns, row):
                data[c].append(float(v))
    return version, columns, data
