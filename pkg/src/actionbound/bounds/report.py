"""The :class:`BoundReport` record and its serializations."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

#: Slack added to every dominance check on top of the reported numerical error.
DOMINANCE_SLACK = 1e-9

CSV_FIELDS = ("bound_name", "bound_value", "actual", "ratio", "est_error")


def _fmt(x) -> str:
    """Float with 12 significant digits; other values via ``str``."""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def _plain(x):
    """Recursively turn NumPy values into JSON-friendly Python values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return {"re": x.real.tolist(), "im": x.imag.tolist()}
        return x.tolist()
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else str(v)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x


@dataclass
class BoundReport:
    """A bound evaluated next to the quantity it controls.

    Attributes
    ----------
    bound_name : str
    bound_value : float
        Right-hand side of the inequality.
    actual : float
        Numerically computed left-hand side.
    ratio : float
        ``actual / bound_value``.
    params : dict
        Inputs that determine both sides.
    grid_info : dict
        Sampling details (grid sizes, integrator steps).
    est_error : float
        Combined numerical error estimate of ``actual`` and ``bound_value``.
    direction : {"upper", "lower"}
        ``upper``: the claim is ``actual <= bound``. ``lower``: the claim is
        ``actual >= bound`` (used for divergence lower bounds).
    extra : dict
        Secondary quantities, such as alternative bounds or contrasts.
    """

    bound_name: str
    bound_value: float
    actual: float
    params: dict = field(default_factory=dict)
    grid_info: dict = field(default_factory=dict)
    est_error: float = 0.0
    direction: str = "upper"
    extra: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        if self.bound_value == 0:
            return 0.0 if self.actual == 0 else math.inf
        return float(self.actual) / float(self.bound_value)

    def holds(self, slack: float = DOMINANCE_SLACK) -> bool:
        """Whether the inequality holds up to ``est_error + slack``."""
        if self.direction == "lower":
            return bool(self.actual >= self.bound_value - self.est_error - slack)
        return bool(self.actual <= self.bound_value + self.est_error + slack)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ratio"] = self.ratio
        d["holds"] = self.holds()
        return _plain(d)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "BoundReport":
        keys = ("bound_name", "bound_value", "actual", "params", "grid_info", "est_error", "direction", "extra")
        return cls(**{k: d[k] for k in keys if k in d})

    def csv_row(self) -> str:
        return ",".join(_fmt(v) for v in (self.bound_name, self.bound_value, self.actual, self.ratio, self.est_error))

    @staticmethod
    def csv_header() -> str:
        return ",".join(CSV_FIELDS)
