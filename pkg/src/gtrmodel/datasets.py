"""Question-order datasets and JSON file formats.

Dataset files::

    {"name": str, "order_ab": {"yy": p, "yn": p, "ny": p, "nn": p},
     "order_ba": {...}, "provenance": str}

Parameter files hold exactly one of ``{"ratios": {...six fields...}}`` or
``{"params": {...seven fields...}}``.
"""
import json
from dataclasses import dataclass, fields
from pathlib import Path

from gtrmodel.core import OUTCOMES, ModelParams, RatioSolution, SequentialProbTable
from gtrmodel.errors import ParameterDomainError

__all__ = [
    "ExperimentDataset",
    "BUILTIN",
    "load_dataset",
    "dataset_from_dict",
    "load_params_file",
    "RENORMALIZE_TOL",
]

RENORMALIZE_TOL = 1e-4


class FileFormatError(ParameterDomainError):
    """Malformed input file; the message carries the location."""


@dataclass(frozen=True)
class ExperimentDataset:
    name: str
    order_ab: dict
    order_ba: dict
    provenance: str = ""

    def __post_init__(self):
        for key in ("order_ab", "order_ba"):
            probs = getattr(self, key)
            missing = [o for o in OUTCOMES if o not in probs]
            if missing:
                raise FileFormatError(f"{key} is missing {missing}")
            total = sum(float(probs[o]) for o in OUTCOMES)
            if abs(total - 1.0) > RENORMALIZE_TOL:
                raise FileFormatError(f"{key} sums to {total!r}; must be within {RENORMALIZE_TOL:g} of 1")

    def table(self):
        """Probability table, each order rescaled to sum to exactly 1."""
        return SequentialProbTable.from_raw(
            [self.order_ab[o] for o in OUTCOMES],
            [self.order_ba[o] for o in OUTCOMES],
            renormalize_tol=RENORMALIZE_TOL,
        )

    def as_dict(self):
        return {
            "name": self.name,
            "order_ab": dict(self.order_ab),
            "order_ba": dict(self.order_ba),
            "provenance": self.provenance,
        }


BUILTIN = {
    "clinton-gore": ExperimentDataset(
        name="clinton-gore",
        order_ab={"yy": 0.4899, "yn": 0.0447, "ny": 0.1767, "nn": 0.2887},
        order_ba={"yy": 0.5625, "yn": 0.1991, "ny": 0.0255, "nn": 0.2129},
        provenance=(
            "1997 Gallup poll (Moore 2002), A = 'Is Bill Clinton honest and trustworthy?', "
            "B = same for Al Gore; probabilities as tabulated by Wang & Busemeyer (2013). "
            "Rounding corrected so each order sums to 1: p(AnBn) 0.2886 -> 0.2887, "
            "p(BnAn) 0.2130 -> 0.2129."
        ),
    ),
    "rose-jackson": ExperimentDataset(
        name="rose-jackson",
        order_ab={"yy": 0.3379, "yn": 0.3241, "ny": 0.0178, "nn": 0.3202},
        order_ba={"yy": 0.4156, "yn": 0.0671, "ny": 0.1234, "nn": 0.3939},
        provenance=(
            "Gallup poll (Moore 2002), A = 'Should Pete Rose be eligible for the Hall of Fame?', "
            "B = same for Shoeless Joe Jackson; probabilities as tabulated by Wang & Busemeyer (2013)."
        ),
    ),
}


def _read_json(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileFormatError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _number(where, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FileFormatError(f"{where}: expected a number, got {value!r}")
    return float(value)


def dataset_from_dict(obj, where="<dataset>"):
    if not isinstance(obj, dict):
        raise FileFormatError(f"{where}: top level must be a JSON object")
    orders = {}
    for key in ("order_ab", "order_ba"):
        block = obj.get(key)
        if not isinstance(block, dict):
            raise FileFormatError(f"{where}: '{key}' must be an object with keys yy, yn, ny, nn")
        extra = sorted(set(block) - set(OUTCOMES))
        if extra:
            raise FileFormatError(f"{where}: '{key}' has unknown keys {extra}")
        missing = [o for o in OUTCOMES if o not in block]
        if missing:
            raise FileFormatError(f"{where}: '{key}' is missing {missing}")
        orders[key] = {o: _number(f"{where}: {key}.{o}", block[o]) for o in OUTCOMES}
    try:
        return ExperimentDataset(
            name=str(obj.get("name", Path(where).stem)),
            order_ab=orders["order_ab"],
            order_ba=orders["order_ba"],
            provenance=str(obj.get("provenance", "")),
        )
    except FileFormatError as exc:
        raise FileFormatError(f"{where}: {exc}") from None


def load_dataset(ref):
    """Resolve a built-in dataset name or a path to a dataset JSON file."""
    if str(ref) in BUILTIN:
        return BUILTIN[str(ref)]
    path = Path(ref)
    if not path.exists():
        raise FileFormatError(
            f"unknown dataset {ref!r}: not a built-in ({', '.join(BUILTIN)}) and no such file"
        )
    return dataset_from_dict(_read_json(path), where=str(path))


def load_params_file(path):
    """Return a :class:`RatioSolution` or :class:`ModelParams` read from ``path``."""
    obj = _read_json(path)
    if not isinstance(obj, dict):
        raise FileFormatError(f"{path}: top level must be a JSON object")
    present = [k for k in ("ratios", "params") if k in obj]
    if len(present) != 1:
        raise FileFormatError(f"{path}: exactly one of 'ratios' or 'params' must be present, found {present}")
    key = present[0]
    cls = RatioSolution if key == "ratios" else ModelParams
    names = [f.name for f in fields(cls)]
    block = obj[key]
    if not isinstance(block, dict):
        raise FileFormatError(f"{path}: '{key}' must be an object")
    missing = [n for n in names if n not in block]
    extra = sorted(set(block) - set(names))
    if missing or extra:
        raise FileFormatError(f"{path}: '{key}' missing {missing}, unknown {extra}")
    values = {n: _number(f"{path}: {key}.{n}", block[n]) for n in names}
    return cls(**values)


def dump_json(obj, path=None):
    text = json.dumps(obj, indent=2, allow_nan=False)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text
