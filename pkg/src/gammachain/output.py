"""
Result files for sweeps and fits
"""

import json
import os
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from .config import Config
from .errors import InvalidParameterError

FORMATS = ("csv", "json")


def _plain(value: Any) -> Any:
    """numpy scalars to Python values for json"""
    if isinstance(value, np.generic):
        return value.item()
    return value


class ResultWriter:
    """Write tables with a parameter header in CSV or JSON"""

    def __init__(self, config: Config):
        self.config = config

    def resolve_path(self, name: str, fmt: str, out: Optional[str] = None) -> str:
        if out:
            return out
        return self.config.get_output_path(f"{name}.{fmt}")

    def write(
        self,
        df: pd.DataFrame,
        name: str,
        metadata: Dict[str, Any],
        fmt: Optional[str] = None,
        out: Optional[str] = None,
    ) -> str:
        """Write df and return the path"""
        fmt = fmt or self.config.OUTPUT_FORMAT
        if fmt not in FORMATS:
            raise InvalidParameterError(f"format must be one of {FORMATS}, got {fmt!r}")
        path = self.resolve_path(name, fmt, out)
        directory = os.path.dirname(path)
        try:
            if directory:
                os.makedirs(directory, exist_ok=True)
            if fmt == "csv":
                self._write_csv(df, path, metadata)
            else:
                self._write_json(df, path, metadata)
        except OSError as exc:
            raise InvalidParameterError(f"Cannot write {path}: {exc}") from exc
        return path

    def _write_csv(self, df: pd.DataFrame, path: str, metadata: Dict[str, Any]) -> None:
        with open(path, 'w', encoding='utf-8', newline='') as f:
            for key, value in metadata.items():
                f.write(f"# {key}={value}\n")
            df.to_csv(f, index=False, float_format=self.config.FLOAT_FORMAT, lineterminator="\n")

    def _write_json(self, df: pd.DataFrame, path: str, metadata: Dict[str, Any]) -> None:
        document = {
            "metadata": {key: _plain(value) for key, value in metadata.items()},
            "columns": [str(c) for c in df.columns],
            "rows": [[_plain(v) for v in row] for row in df.itertuples(index=False, name=None)],
        }
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(document, f, indent=2)
            f.write("\n")


def read_result_csv(path: str) -> pd.DataFrame:
    """Load a CSV written by ResultWriter, skipping the parameter header"""
    return pd.read_csv(path, comment="#")


def read_metadata(path: str) -> Dict[str, str]:
    metadata = {}
    with open(path, 'r', encoding='utf-8') as f:
        for line in f:
            if not line.startswith("# "):
                break
            key, _, value = line[2:].rstrip("\n").partition("=")
            metadata[key] = value
    return metadata
