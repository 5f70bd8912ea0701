"""
Run reports: one record per outer iteration plus the final iterate, serialized to a JSON document and a CSV
trajectory.
"""
from __future__ import unicode_literals

import csv
import io
import json
from dataclasses import dataclass, field, asdict
from datetime import datetime
from typing import List, Optional

from dateutil import parser
from dateutil.tz import tzutc

from rannlr.conf import get_setting

CSV_HEADER = ['k', 'f', 'max_violation', 'stationarity', 'inner_iters', 'cum_inner_iters', 'wall_ms']


@dataclass
class IterationRecord(object):
    """
    The state after outer iteration ``k``: objective and feasibility at ``x^k``, the stationarity the inner
    solver achieved, its iteration count and a summary of the duals ``lam^k`` used for the primal update.
    """
    k: int
    f: float
    max_violation: float
    stationarity: float
    inner_iters: int
    cum_inner_iters: int
    wall_ms: float
    lam_min: Optional[float] = None
    lam_max: Optional[float] = None
    lam_l1: Optional[float] = None
    violation_index: Optional[int] = None


@dataclass
class RunReport(object):
    method: str
    instance: str
    seed: Optional[int] = None
    config: dict = field(default_factory=dict)
    iterations: List[IterationRecord] = field(default_factory=list)
    x: Optional[list] = None
    final_objective: Optional[float] = None
    reference_value: Optional[float] = None
    relative_gap: Optional[float] = None
    precompute_ms: float = 0.0
    solve_ms: float = 0.0
    started_at: datetime = field(default_factory=lambda: datetime.now(tzutc()))
    aborted: bool = False
    notes: str = ''

    def append(self, record):
        """
        Add the record of the next outer iteration. Cumulative inner iteration counts are never decreasing.
        """
        if self.iterations and record.cum_inner_iters < self.iterations[-1].cum_inner_iters:
            raise ValueError("Cumulative inner iterations must not decrease.")
        self.iterations.append(record)

    def finalize(self, x, objective):
        """
        Store the final iterate and compute the relative gap ``|f - f*| / |f*|`` when a reference is known.
        """
        self.x = [float(value) for value in x]
        self.final_objective = float(objective)
        if self.reference_value is not None and self.reference_value != 0.0:
            self.relative_gap = abs(self.final_objective - self.reference_value) / abs(self.reference_value)

    @property
    def outer_iterations(self):
        return len(self.iterations)

    @property
    def total_inner_iters(self):
        return self.iterations[-1].cum_inner_iters if self.iterations else 0

    def as_dict(self):
        data = asdict(self)
        data['started_at'] = self.started_at.isoformat()
        return data

    def to_json(self, indent=2):
        """
        Floats are written with ``repr`` precision, so they parse back to identical values.
        """
        return json.dumps(self.as_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data['iterations'] = [IterationRecord(**record) for record in data.get('iterations', [])]
        if data.get('started_at'):
            data['started_at'] = parser.isoparse(data['started_at'])
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_csv(self, include_timing=True):
        """
        :param include_timing: Keep the ``wall_ms`` column. Without it two runs with the same configuration and
                               seed produce byte-identical output.
        :return: The trajectory, one row per outer iteration.
        :rtype: str
        """
        float_format = get_setting('float_format')
        header = CSV_HEADER if include_timing else CSV_HEADER[:-1]

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(header)
        for record in self.iterations:
            row = [
                record.k,
                float_format % record.f,
                float_format % record.max_violation,
                float_format % record.stationarity,
                record.inner_iters,
                record.cum_inner_iters,
            ]
            if include_timing:
                row.append(float_format % record.wall_ms)
            writer.writerow(row)
        return buffer.getvalue()

    def write(self, json_path=None, csv_path=None, include_timing=True):
        if json_path:
            with open(json_path, 'w') as fp:
                fp.write(self.to_json())
        if csv_path:
            with open(csv_path, 'w', newline='') as fp:
                fp.write(self.to_csv(include_timing=include_timing))

    def __str__(self):
        gap = '-' if self.relative_gap is None else '%.4g%%' % (100.0 * self.relative_gap)
        return '%s on %s: f=%s after %d outer / %d inner iterations (gap %s)' % (
            self.method, self.instance, self.final_objective, self.outer_iterations, self.total_inner_iters, gap)
