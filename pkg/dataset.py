"""Dataset type and CSV ingestion/export."""
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, List, Sequence, Union

import numpy as np
import pandas as pd

from errors import CsvParseError, InputError, NonNumericCellError

logger = logging.getLogger(__name__)

_LINE_RE = re.compile(r"line (\d+)")


@dataclass
class Dataset:
    """n x p predictor matrix, length-n response and column names."""
    X: np.ndarray
    y: np.ndarray
    predictor_names: List[str] = field(default_factory=list)
    response_name: str = "y"

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float).ravel()
        if self.X.ndim != 2:
            raise InputError(f"X must be a matrix, got {self.X.ndim} dimensions")
        if self.X.shape[0] != self.y.size:
            raise InputError(f"X has {self.X.shape[0]} rows but y has {self.y.size} entries")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.y))):
            raise InputError("data contain non-finite values")
        if not self.predictor_names:
            self.predictor_names = [f"X{j}" for j in range(1, self.p + 1)]
        if len(self.predictor_names) != self.p:
            raise InputError(f"{len(self.predictor_names)} names for {self.p} predictors")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def column_name(self, j: int) -> str:
        """Name of coordinate j (1-based)."""
        return self.predictor_names[j - 1]

    def check_coordinate(self, j: int) -> None:
        if not 1 <= j <= self.p:
            raise InputError(f"coordinate j={j} outside 1..{self.p}")

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.X, columns=self.predictor_names)
        frame[self.response_name] = self.y
        return frame


def _resolve_response(columns: Sequence[str], response: Union[str, int]) -> str:
    if isinstance(response, str) and response in columns:
        return response
    try:
        # header read as a data row so every line is held to the same field count
        frame = pd.read_csv(
            path, header=None, index_col=False, dtype=str,
            keep_default_na=False, na_filter=False, skipinitialspace=True,
        )
    except pd.errors.EmptyDataError:
        raise CsvParseError("file is empty or has no header row")
    except pd.errors.ParserError as e:
        match = _LINE_RE.search(str(e))
        raise CsvParseError(str(e).strip(), line=int(match.group(1)) if match else None)
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read {getattr(path, 'name', path)}: {e}")

    width = frame.shape[1]
    if width < 2:
        raise CsvParseError("need a response column and at least one predictor", line=1)
    short = frame.isna().any(axis=1).to_numpy()
    if short.any():
        row = int(np.flatnonzero(short)[0])
        count = int(frame.iloc[row].notna().sum())
        raise CsvParseError(f"expected {width} fields, saw {count}", line=row + 1)
    if frame.shape[0] < 2:
        raise CsvParseError("no data rows after the header", line=2)

    columns = [str(c).strip() for c in frame.iloc[0]]
    if len(set(columns)) != len(columns):
        raise CsvParseError(f"duplicate column names in header {columns}", line=1)
    frame = frame.iloc[1:].reset_index(drop=True)
    frame.columns = columns
    response_name = _resolve_response(columns, response)

    numeric = {}
    for column in columns:
        raw = frame[column].str.strip()
        values = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=float)
        bad = ~np.isfinite(values)
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            # header is line 1
            raise NonNumericCellError(line=row + 2, column=column, value=raw.iloc[row])
        # exact decimal parse so write_csv output reads back bit for bit
        numeric[column] = raw.astype(float).to_numpy()

    predictors = [c for c in columns if c != response_name]
    X = np.column_stack([numeric[c] for c in predictors])
    data = Dataset(X=X, y=numeric[response_name], predictor_names=predictors, response_name=response_name)
    source = getattr(path, "name", path)
    logger.info(f"Loaded {source}: n={data.n}, p={data.p}, response '{response_name}'")
    return data


def write_csv(data: Dataset, path: Union[str, Path]) -> None:
    """Write a dataset so that read_csv reproduces it bit for bit."""
    data.to_frame().to_csv(path, index=False, float_format="%.17g")
    logger.info(f"Wrote {data.n} rows x {data.p + 1} columns to {path}")


def parse_coordinates(text: str) -> List[int]:
    """'1,2,5' or '1-5,10' to a sorted list of 1-based indices."""
    coords = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                lo, hi = (int(v) for v in part.split("-", 1))
                coords.update(range(lo, hi + 1))
            else:
                coords.add(int(part))
        except ValueError:
            raise InputError(f"bad coordinate list '{text}'")
    if not coords:
        raise InputError("empty coordinate list")
    return sorted(coords)
