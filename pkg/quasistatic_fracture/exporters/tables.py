"""
CSV tables: the energy ledger, study tables and experiment tables.
"""

from pathlib import Path
from typing import Union

import pandas as pd

from config import get_output_config

from ..evolution.ledger import EvolutionLedger


def write_table(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=get_output_config()['float_format'], lineterminator="\n")
    return path


def read_table(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def write_ledger(ledger: EvolutionLedger, path: Union[str, Path]) -> Path:
    return write_table(ledger.to_frame(), path)


def read_ledger(path: Union[str, Path]) -> EvolutionLedger:
    return EvolutionLedger.from_frame(read_table(path))


__all__ = ['write_table', 'read_table', 'write_ledger', 'read_ledger']
