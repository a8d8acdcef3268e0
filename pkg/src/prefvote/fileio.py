"""File formats: comparison and alternative CSVs, profile files, model JSON.

Formats are deliberately small and strict.  Parsers reject malformed
input with ``ParseError`` carrying the 1-based line number.  Model files
store reals as decimal strings with 17 significant digits, which is
always enough to reproduce the exact double on load, and every file
records a format name and version.

Also defines the crash-scenario feature encoding used by the dilemma
examples: 20 character-count features in alphabetical order, then the
affected group (0 passengers, 1 pedestrians), then crossing legality
(0 none, +1 legal, -1 illegal), then the total character count.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .experiments import AccuracyCurve
from .learning import FitConfig, PairwiseComparison
from .pipeline import SummaryModel
from .profiles import Alternative, AnonymousProfile, Ranking

FILE_VERSION = 1
VOTER_MODELS_FORMAT = "voter-models"
SUMMARY_MODEL_FORMAT = "summary-model"

#: Character types appearing in crash dilemmas, alphabetical; their counts
#: occupy the first 20 feature slots in this exact order.
CHARACTER_TYPES = (
    "baby",
    "boy",
    "cat",
    "criminal",
    "dog",
    "elderly_man",
    "elderly_woman",
    "female_athlete",
    "female_doctor",
    "female_executive",
    "girl",
    "homeless_person",
    "large_man",
    "large_woman",
    "male_athlete",
    "male_doctor",
    "male_executive",
    "man",
    "pregnant_woman",
    "woman",
)

RELATION_PASSENGERS = "passengers"
RELATION_PEDESTRIANS = "pedestrians"
LEGALITY_NONE = "none"
LEGALITY_LEGAL = "legal"
LEGALITY_ILLEGAL = "illegal"

MM_FEATURE_NAMES = CHARACTER_TYPES + ("relation", "legality", "total_characters")
MM_DIM = len(MM_FEATURE_NAMES)


class ParseError(ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ComparisonRecord:
    """One comparison row: a voter chose one feature vector over another."""

    voter_id: str
    chosen: tuple[float, ...]
    rejected: tuple[float, ...]

    def to_comparison(self) -> PairwiseComparison:
        return PairwiseComparison(
            chosen=np.asarray(self.chosen), rejected=np.asarray(self.rejected)
        )


def _format_real(value: float) -> str:
    """Decimal text with 17 significant digits; lossless for binary64."""
    if not math.isfinite(value):
        raise ValueError(f"cannot serialize non-finite value {value!r}")
    return format(float(value), ".17g")


def _read_real(token: object) -> float:
    try:
        value = float(token)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        raise ParseError(f"non-numeric value {token!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {token!r}")
    return value


def _expect_header(row: list[str] | None, expected: list[str]) -> None:
    if row is None:
        raise ParseError("missing header row", line=1)
    got = [cell.strip() for cell in row]
    if got != expected:
        raise ParseError(
            f"bad header: expected {','.join(expected)!r}, got {','.join(got)!r}",
            line=1,
        )


def _parse_float(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"non-numeric field {token.strip()!r}", line=line) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite field {token.strip()!r}", line=line)
    return value


def parse_comparisons(stream: IO[str]) -> list[ComparisonRecord]:
    """Read comparison rows from CSV.

    The header fixes the feature dimension d:
    ``voter_id,c_1,...,c_d,r_1,...,r_d``.  An empty body is valid.
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        raise ParseError("missing header row", line=1)
    cells = [cell.strip() for cell in header]
    if not cells or cells[0] != "voter_id" or len(cells) < 3 or len(cells) % 2 == 0:
        raise ParseError(
            "bad header: expected voter_id,c_1..c_d,r_1..r_d", line=1
        )
    d = (len(cells) - 1) // 2
    expected = (
        ["voter_id"]
        + [f"c_{k}" for k in range(1, d + 1)]
        + [f"r_{k}" for k in range(1, d + 1)]
    )
    _expect_header(header, expected)
    records = []
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 1 + 2 * d:
            raise ParseError(
                f"expected {1 + 2 * d} fields, got {len(row)}", line=line
            )
        voter = row[0].strip()
        if not voter:
            raise ParseError("empty voter_id", line=line)
        values = [_parse_float(token, line) for token in row[1:]]
        records.append(
            ComparisonRecord(
                voter_id=voter,
                chosen=tuple(values[:d]),
                rejected=tuple(values[d:]),
            )
        )
    return records


def group_comparisons(
    records: Iterable[ComparisonRecord],
) -> dict[str, list[PairwiseComparison]]:
    """Bucket records by voter, preserving first-appearance order."""
    out: dict[str, list[PairwiseComparison]] = {}
    for record in records:
        out.setdefault(record.voter_id, []).append(record.to_comparison())
    return out


def parse_alternatives(stream: IO[str]) -> list[Alternative]:
    """Read alternatives from CSV with header ``id,f_1,...,f_d``."""
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        raise ParseError("missing header row", line=1)
    cells = [cell.strip() for cell in header]
    if not cells or cells[0] != "id" or len(cells) < 2:
        raise ParseError("bad header: expected id,f_1..f_d", line=1)
    d = len(cells) - 1
    _expect_header(header, ["id"] + [f"f_{k}" for k in range(1, d + 1)])
    seen = set()
    alternatives = []
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 1 + d:
            raise ParseError(f"expected {1 + d} fields, got {len(row)}", line=line)
        alt_id = row[0].strip()
        if not alt_id:
            raise ParseError("empty id", line=line)
        if alt_id in seen:
            raise ParseError(f"duplicate id {alt_id!r}", line=line)
        seen.add(alt_id)
        features = tuple(_parse_float(token, line) for token in row[1:])
        alternatives.append(Alternative(id=alt_id, features=features))
    if not alternatives:
        raise ParseError("no alternatives in file")
    return alternatives


def parse_profile(stream: IO[str]) -> AnonymousProfile:
    """Read a ranking profile from CSV with header ``weight,ranking``.

    Rankings use ``>`` separators, e.g. ``0.35,a>b>c``.  Weight-sum and
    coverage violations surface as ``ValueError`` from the profile
    constructor.
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    _expect_header(header, ["weight", "ranking"])
    support: dict[Ranking, float] = {}
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", line=line)
        weight = _parse_float(row[0], line)
        try:
            ranking = Ranking.from_string(row[1])
        except ValueError as exc:
            raise ParseError(str(exc), line=line) from None
        if ranking in support:
            raise ParseError(
                f"duplicate ranking {ranking.to_string()!r}", line=line
            )
        support[ranking] = weight
    if not support:
        raise ParseError("no rankings in file")
    return AnonymousProfile(support)


def encode_mm_alternative(
    counts: Mapping[str, int], relation: str, legality: str
) -> np.ndarray:
    """Encode one crash-dilemma side as a feature vector of length 23."""
    unknown = sorted(set(counts) - set(CHARACTER_TYPES))
    if unknown:
        raise ValueError(f"unknown character types: {unknown}")
    vector = np.zeros(MM_DIM)
    for k, name in enumerate(CHARACTER_TYPES):
        count = counts.get(name, 0)
        if count != int(count) or count < 0:
            raise ValueError(f"count for {name!r} must be a nonnegative integer")
        vector[k] = float(count)
    if relation == RELATION_PASSENGERS:
        vector[20] = 0.0
    elif relation == RELATION_PEDESTRIANS:
        vector[20] = 1.0
    else:
        raise ValueError(
            f"relation must be {RELATION_PASSENGERS!r} or "
            f"{RELATION_PEDESTRIANS!r}, got {relation!r}"
        )
    if legality == LEGALITY_NONE:
        vector[21] = 0.0
    elif legality == LEGALITY_LEGAL:
        vector[21] = 1.0
    elif legality == LEGALITY_ILLEGAL:
        vector[21] = -1.0
    else:
        raise ValueError(
            f"legality must be one of {LEGALITY_NONE!r}, {LEGALITY_LEGAL!r}, "
            f"{LEGALITY_ILLEGAL!r}, got {legality!r}"
        )
    vector[22] = vector[:20].sum()
    return vector


@dataclass(frozen=True)
class VoterModelRecord:
    """One fitted voter in a model file."""

    voter_id: str
    beta: tuple[float, ...]
    converged: bool
    iterations: int


def save_voter_models(
    path: str,
    records: Sequence[VoterModelRecord],
    fit_config: FitConfig,
) -> None:
    """Write per-voter weights plus fit metadata as JSON."""
    if not records:
        raise ValueError("need at least one voter model")
    dims = {len(record.beta) for record in records}
    if len(dims) > 1:
        raise ValueError(f"voter models disagree on dimension: {sorted(dims)}")
    payload = {
        "format": VOTER_MODELS_FORMAT,
        "version": FILE_VERSION,
        "d": dims.pop(),
        "fit": {
            "l2_penalty": _format_real(fit_config.l2_penalty),
            "gradient_tolerance": _format_real(fit_config.gradient_tolerance),
            "max_iterations": fit_config.max_iterations,
        },
        "voters": [
            {
                "voter_id": record.voter_id,
                "beta": [_format_real(v) for v in record.beta],
                "converged": record.converged,
                "iterations": record.iterations,
            }
            for record in records
        ],
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def load_voter_models(path: str) -> tuple[list[VoterModelRecord], dict]:
    """Read a voter-models file; returns (records, fit metadata)."""
    payload = _load_json(path, VOTER_MODELS_FORMAT)
    d = payload.get("d")
    records = []
    for entry in payload.get("voters", []):
        beta = tuple(_read_real(v) for v in entry["beta"])
        if len(beta) != d:
            raise ParseError(
                f"voter {entry.get('voter_id')!r} has dimension {len(beta)}, "
                f"file declares {d}"
            )
        records.append(
            VoterModelRecord(
                voter_id=str(entry["voter_id"]),
                beta=beta,
                converged=bool(entry.get("converged", True)),
                iterations=int(entry.get("iterations", 0)),
            )
        )
    if not records:
        raise ParseError("voter-models file has no voters")
    fit = dict(payload.get("fit", {}))
    for key in ("l2_penalty", "gradient_tolerance"):
        if key in fit:
            fit[key] = _read_real(fit[key])
    return records, fit


def save_summary_model(path: str, model: SummaryModel) -> None:
    """Write a summary model as JSON."""
    payload = {
        "format": SUMMARY_MODEL_FORMAT,
        "version": FILE_VERSION,
        "d": model.dim,
        "n_voters": model.n_voters,
        "beta": [_format_real(v) for v in model.beta_hat],
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def load_summary_model(path: str) -> SummaryModel:
    payload = _load_json(path, SUMMARY_MODEL_FORMAT)
    beta = [_read_real(v) for v in payload["beta"]]
    if len(beta) != payload.get("d"):
        raise ParseError(
            f"beta has dimension {len(beta)}, file declares {payload.get('d')}"
        )
    return SummaryModel(beta_hat=np.asarray(beta), n_voters=int(payload["n_voters"]))


def _load_json(path: str, expected_format: str) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise ParseError("model file must hold a JSON object")
    if payload.get("format") != expected_format:
        raise ParseError(
            f"unexpected format {payload.get('format')!r}, "
            f"expected {expected_format!r}"
        )
    if payload.get("version") != FILE_VERSION:
        raise ParseError(f"unsupported version {payload.get('version')!r}")
    return payload


def format_curve(curve: AccuracyCurve) -> str:
    """Render a curve as a CSV table: x, mean accuracy, standard error."""
    lines = ["x,mean_accuracy,stderr"]
    for x, mean, err in zip(curve.x_values, curve.mean_accuracy, curve.stderr()):
        lines.append(f"{x},{mean:.6f},{err:.6f}")
    return "\n".join(lines) + "\n"
