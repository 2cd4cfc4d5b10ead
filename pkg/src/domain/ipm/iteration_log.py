# src/domain/ipm/iteration_log.py
import csv
import math
import sys
from dataclasses import astuple, dataclass, fields
from typing import Optional, TextIO


@dataclass(frozen=True)
class IterationRecord:
    k: int
    objective: float
    inf_pr: float
    inf_du: float
    mu: float
    alpha: float
    delta_w: float
    corrections: int
    trials: int


class IterationLogger:
    """每次迭代一行：对齐文本或 CSV"""

    def __init__(self, stream: Optional[TextIO] = None, csv_format: bool = False, enabled: bool = True):
        self.stream = stream if stream is not None else sys.stdout
        self.csv_format = csv_format
        self.enabled = enabled
        self._writer = csv.writer(self.stream) if csv_format else None
        self._header_done = False

    def _header(self) -> None:
        if self.csv_format:
            self._writer.writerow([f.name for f in fields(IterationRecord)])
        else:
            self.stream.write(
                f"{'iter':>4} {'objective':>15} {'inf_pr':>9} {'inf_du':>9} {'lg(mu)':>6} "
                f"{'alpha':>9} {'lg(rg)':>6} {'corr':>4} {'ls':>3}\n"
            )
        self._header_done = True

    def log(self, record: IterationRecord) -> None:
        if not self.enabled:
            return
        if not self._header_done:
            self._header()
        if self.csv_format:
            self._writer.writerow(astuple(record))
        else:
            lg_rg = f"{math.log10(record.delta_w):6.1f}" if record.delta_w > 0 else f"{'-':>6}"
            self.stream.write(
                f"{record.k:4d} {record.objective:+15.8e} {record.inf_pr:9.2e} {record.inf_du:9.2e} "
                f"{math.log10(record.mu):6.1f} {record.alpha:9.2e} {lg_rg} {record.corrections:4d} "
                f"{record.trials:3d}\n"
            )
        self.stream.flush()
