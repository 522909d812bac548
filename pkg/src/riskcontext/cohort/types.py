"""Claims-domain types: visits, patient records, cohort configuration, CCS crosswalk."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, asdict
from typing import Iterable

import numpy as np

from ..errors import MappingError

# Day 0 of every claims file is Jan 1 of this year; ages are computed at
# year precision from it.
EPOCH_YEAR = 2013
DAYS_PER_YEAR = 365

_ICD9 = re.compile(r"^\d{3}(\.\d{1,2})?$")
_ICD9_V = re.compile(r"^V\d{2}(\.\d{1,2})?$")
_ICD9_E = re.compile(r"^E\d{3}(\.\d)?$")
_ICD10 = re.compile(r"^[A-Z]\d{2}(\.\d{1,4})?$")


def is_valid_code(code: str) -> bool:
    """True if `code` has ICD-9 (incl. V/E prefixes) or ICD-10 syntax."""
    return bool(
        _ICD9.match(code)
        or _ICD9_V.match(code)
        or _ICD9_E.match(code)
        or _ICD10.match(code)
    )


def epoch_year_of(day: int) -> int:
    """Calendar year containing a day index (365-day claims years)."""
    return EPOCH_YEAR + day // DAYS_PER_YEAR


@dataclass(frozen=True)
class Visit:
    """One dated claim line: a day index plus its diagnosis codes."""

    date: int
    codes: tuple[str, ...]

    def __post_init__(self):
        if self.date < 0:
            raise ValueError(f"visit date must be >= 0, got {self.date}")
        if not self.codes:
            raise ValueError("visit must carry at least one diagnosis code")
        for code in self.codes:
            if not is_valid_code(code):
                raise ValueError(f"not an ICD-9/ICD-10 code: {code!r}")


@dataclass(frozen=True)
class PatientRecord:
    """A patient's demographics plus their time-ordered visit stream."""

    patient_id: str
    birth_year: int
    sex: str  # "F" or "M"
    enrollment_start: int
    enrollment_end: int
    visits: tuple[Visit, ...]

    def __post_init__(self):
        if self.sex not in ("F", "M"):
            raise ValueError(f"sex must be 'F' or 'M', got {self.sex!r}")
        if self.enrollment_start > self.enrollment_end:
            raise ValueError("enrollment_start must be <= enrollment_end")
        dates = [v.date for v in self.visits]
        if dates != sorted(dates):
            raise ValueError("visits must be sorted ascending by date")
        for v in self.visits:
            if not (self.enrollment_start <= v.date <= self.enrollment_end):
                raise ValueError(
                    f"visit day {v.date} outside enrollment "
                    f"[{self.enrollment_start}, {self.enrollment_end}]"
                )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["visits"] = [{"date": v.date, "codes": list(v.codes)} for v in self.visits]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PatientRecord":
        return cls(
            patient_id=d["patient_id"],
            birth_year=int(d["birth_year"]),
            sex=d["sex"],
            enrollment_start=int(d["enrollment_start"]),
            enrollment_end=int(d["enrollment_end"]),
            visits=tuple(
                Visit(date=int(v["date"]), codes=tuple(v["codes"])) for v in d["visits"]
            ),
        )


def write_claims(patients: Iterable[PatientRecord], path) -> None:
    """Write newline-delimited JSON, one patient per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for p in patients:
            fh.write(json.dumps(p.to_dict(), sort_keys=True) + "\n")


def read_claims(path) -> list[PatientRecord]:
    with open(path, encoding="utf-8") as fh:
        return [PatientRecord.from_dict(json.loads(line)) for line in fh if line.strip()]


@dataclass(frozen=True)
class CohortConfig:
    """Inclusion constants for the T2DM cohort and its CKD outcome window."""

    t2dm_codes: tuple[str, ...] = ("250.*0", "250.*2", "362.0", "E11.*")
    t1d_codes: tuple[str, ...] = ("250.*1", "250.*3", "E10.*")
    ckd_codes: tuple[str, ...] = ("N18.*", "585.*", "403.*")
    min_t2dm_visits: int = 2
    pre_enrollment_days: int = 365
    age_min: int = 19
    age_max: int = 64
    horizon_days: int = 360

    def __post_init__(self):
        if self.horizon_days <= 0:
            raise ValueError("horizon_days must be positive")
        if self.age_min >= self.age_max:
            raise ValueError("age_min must be < age_max")

    @classmethod
    def from_dict(cls, d: dict) -> "CohortConfig":
        kwargs = dict(d)
        for key in ("t2dm_codes", "t1d_codes", "ckd_codes"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("t2dm_codes", "t1d_codes", "ckd_codes"):
            d[key] = list(d[key])
        return d


def pattern_to_regex(pattern: str) -> re.Pattern:
    """Compile a code pattern to a regex.

    A trailing ".*" makes the decimal part optional ("E11.*" matches both
    "E11" and "E11.9"); an interior "*" matches any run of characters
    within one segment ("250.*0" matches "250.00" and "250.40").
    """
    optional_tail = pattern.endswith(".*")
    if optional_tail:
        pattern = pattern[:-2]
    parts = [re.escape(chunk) for chunk in pattern.split("*")]
    body = "[^.]*".join(parts)
    if optional_tail:
        body += r"(\..*)?"
    return re.compile(f"^{body}$")


class CodeMatcher:
    """Matches raw diagnosis codes against a set of code patterns."""

    def __init__(self, patterns: Iterable[str]):
        self._regexes = [pattern_to_regex(p) for p in patterns]

    def matches(self, code: str) -> bool:
        return any(r.match(code) for r in self._regexes)

    def any_in(self, codes: Iterable[str]) -> bool:
        return any(self.matches(c) for c in codes)


class CcsMap:
    """ICD pattern -> (CCS code, Level-1 group) crosswalk.

    Load-time validation guarantees each CCS code carries exactly one
    Level-1 label; lookups on unmapped codes raise instead of dropping.
    """

    def __init__(self, entries: dict[str, tuple[int, str]]):
        if not entries:
            raise MappingError("crosswalk has no entries")
        ccs_to_group: dict[int, str] = {}
        for pattern, (ccs, group) in entries.items():
            seen = ccs_to_group.get(ccs)
            if seen is not None and seen != group:
                raise MappingError(
                    f"CCS {ccs} mapped to two Level-1 groups: {seen!r} and {group!r}"
                )
            ccs_to_group[ccs] = group
        self.entries = dict(entries)
        self.ccs_to_group = ccs_to_group
        self._compiled = [
            (pattern, pattern_to_regex(pattern), ccs, group)
            for pattern, (ccs, group) in sorted(entries.items())
        ]

    def lookup(self, code: str) -> tuple[int, str]:
        """Resolve a code; the most specific (longest literal) pattern wins."""
        hits = [
            (len(pattern.replace("*", "")), pattern, ccs, group)
            for pattern, regex, ccs, group in self._compiled
            if regex.match(code)
        ]
        if not hits:
            raise MappingError(f"no CCS mapping for diagnosis code {code!r}")
        hits.sort(key=lambda h: (-h[0], h[1]))
        if len(hits) > 1 and hits[0][0] == hits[1][0] and hits[0][2] != hits[1][2]:
            raise MappingError(
                f"ambiguous CCS mapping for {code!r}: "
                f"{hits[0][1]!r} -> {hits[0][2]} vs {hits[1][1]!r} -> {hits[1][2]}"
            )
        return hits[0][2], hits[0][3]

    def try_lookup(self, code: str) -> tuple[int, str] | None:
        try:
            return self.lookup(code)
        except MappingError:
            return None

    def to_dict(self) -> dict:
        return {
            pattern: {"ccs": ccs, "level1": group}
            for pattern, (ccs, group) in sorted(self.entries.items())
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CcsMap":
        return cls({p: (int(v["ccs"]), v["level1"]) for p, v in d.items()})

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "CcsMap":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


AGE_GROUPS = ("AGE_GRP_Y", "AGE_GRP_M", "AGE_GRP_O")
SEX_FEMALE = "SEX_FEMALE"

# Bins partition the 19-64 inclusion range.
AGE_BINS = {"AGE_GRP_Y": (19, 44), "AGE_GRP_M": (45, 54), "AGE_GRP_O": (55, 64)}


def age_group(age: int) -> str:
    for name, (lo, hi) in AGE_BINS.items():
        if lo <= age <= hi:
            return name
    raise ValueError(f"age {age} outside the cohort range 19-64")


@dataclass
class FeatureMatrix:
    """Binary design matrix plus labels for one cohort.

    Columns are CCS indicators (sorted, zero-padded names), then the three
    age-group one-hots, then SEX_FEMALE. Features see only visits at or
    before the index date; labels only the (index, index + horizon] window.
    """

    feature_names: list[str]
    X: np.ndarray
    y: np.ndarray
    index_dates: np.ndarray
    patient_ids: list[str]
    ccs_labels: dict[str, str] = field(default_factory=dict)
    dropped_features: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.X = np.asarray(self.X)
        self.y = np.asarray(self.y)
        self.index_dates = np.asarray(self.index_dates)
        n, d = self.X.shape
        if d != len(self.feature_names):
            raise ValueError("row width does not match feature_names")
        if not (len(self.y) == len(self.index_dates) == len(self.patient_ids) == n):
            raise ValueError("rows, labels, index dates, and ids must align")

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    def row_for(self, patient_id: str) -> int:
        try:
            return self.patient_ids.index(patient_id)
        except ValueError:
            raise KeyError(patient_id) from None

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "feature_names": list(self.feature_names),
            "patient_ids": list(self.patient_ids),
            "index_dates": [int(v) for v in self.index_dates],
            "labels": [int(v) for v in self.y],
            "rows": [[int(v) for v in row] for row in self.X],
            "ccs_labels": dict(sorted(self.ccs_labels.items())),
            "dropped_features": list(self.dropped_features),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureMatrix":
        return cls(
            feature_names=list(d["feature_names"]),
            X=np.array(d["rows"], dtype=np.float64).reshape(
                len(d["rows"]), len(d["feature_names"])
            ),
            y=np.array(d["labels"], dtype=np.float64),
            index_dates=np.array(d["index_dates"], dtype=np.int64),
            patient_ids=list(d["patient_ids"]),
            ccs_labels=dict(d.get("ccs_labels", {})),
            dropped_features=list(d.get("dropped_features", [])),
        )
