"""Dataset representation, ARFF/CSV ingestion, folding and resampling.

The supported ARFF subset:

    @relation <name>
    @attribute <name> numeric|real|integer        (optional [lo,hi] range)
    @attribute <name> {v1, v2, ...}
    @data
    v,v,...,v

Keywords are case-insensitive, '%' starts a comment, names and nominal
values may be quoted with single or double quotes.  Sparse rows
(``{i v, ...}``), string and date attributes, and missing values (``?``)
are rejected.  The class attribute defaults to the last nominal attribute
in declaration order.

Values are held column-wise in a float matrix; nominal cells store the
index of the value in the attribute's declared value list.  Datasets are
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateWeights,
    EmptyInput,
    InvalidK,
    MissingValue,
    ParseError,
    UnsupportedFeature,
)
from .seeds import rng_from

_NUMERIC_KINDS = frozenset(("numeric", "real", "integer"))
_UNSUPPORTED_KINDS = frozenset(("string", "date", "relational"))


@dataclass(frozen=True)
class AttributeSpec:
    """One column: ``values`` is None for numeric, the declared value
    tuple for nominal."""

    name: str
    values: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.values is not None:
            if len(self.values) == 0:
                raise ValueError(f"attribute {self.name!r}: empty nominal value list")
            if len(set(self.values)) != len(self.values):
                raise ValueError(f"attribute {self.name!r}: duplicate nominal values")

    @property
    def is_nominal(self) -> bool:
        return self.values is not None


@dataclass(frozen=True)
class Instance:
    """A single row: raw value vector (aligned with the attribute list)
    plus a positive weight."""

    values: np.ndarray
    weight: float = 1.0


class Dataset:
    """Immutable table of instances with one nominal class attribute."""

    __slots__ = ("attributes", "values", "weights", "class_attribute")

    def __init__(
        self,
        attributes,
        values,
        class_attribute: int,
        weights=None,
    ):
        attributes = tuple(attributes)
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("values must be a 2-D array")
        n, m = values.shape
        if m != len(attributes):
            raise ValueError(f"{m} columns for {len(attributes)} attributes")
        if not 0 <= class_attribute < m:
            raise ValueError(f"class attribute index {class_attribute} out of range")
        cls_spec = attributes[class_attribute]
        if not cls_spec.is_nominal:
            raise ValueError("class attribute must be nominal")
        if len(cls_spec.values) < 2:
            raise ValueError("class attribute needs at least 2 declared labels")
        if weights is None:
            weights = np.ones(n)
        else:
            weights = np.asarray(weights, dtype=np.float64).copy()
            if weights.shape != (n,):
                raise ValueError("weights shape does not match instance count")
        if n:
            if not np.all(np.isfinite(values)):
                raise ValueError("non-finite attribute value")
            if not (np.all(np.isfinite(weights)) and np.all(weights > 0)):
                raise ValueError("instance weights must be finite and > 0")
            for j, spec in enumerate(attributes):
                if spec.is_nominal:
                    col = values[:, j]
                    if np.any(col != np.floor(col)) or col.min() < 0 or col.max() >= len(
                        spec.values
                    ):
                        raise ValueError(
                            f"attribute {spec.name!r}: nominal index out of range"
                        )
        values.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "attributes", attributes)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "class_attribute", class_attribute)

    def __setattr__(self, name, value):
        raise AttributeError("Dataset is immutable")

    # -- basic shape --------------------------------------------------

    @property
    def n_instances(self) -> int:
        return self.values.shape[0]

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    @property
    def class_names(self) -> tuple[str, ...]:
        return self.attributes[self.class_attribute].values

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def class_indices(self) -> np.ndarray:
        """Per-instance class index, as ints."""
        return self.values[:, self.class_attribute].astype(np.intp)

    def class_counts(self) -> np.ndarray:
        """Weighted instance count per declared class."""
        return np.bincount(
            self.class_indices(), weights=self.weights, minlength=self.n_classes
        )

    def classes_present(self) -> tuple[int, ...]:
        return tuple(np.flatnonzero(self.class_counts() > 0))

    def instance(self, i: int) -> Instance:
        return Instance(self.values[i], float(self.weights[i]))

    @property
    def instances(self) -> list[Instance]:
        return [self.instance(i) for i in range(self.n_instances)]

    def __len__(self) -> int:
        return self.n_instances

    def __repr__(self) -> str:
        return (
            f"Dataset({self.n_instances} instances, {self.n_attributes} attributes, "
            f"{self.n_classes} classes)"
        )

    # -- derived datasets ----------------------------------------------

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=np.intp)
        return Dataset(
            self.attributes,
            self.values[indices],
            self.class_attribute,
            self.weights[indices],
        )

    def with_weights(self, weights) -> "Dataset":
        return Dataset(self.attributes, self.values, self.class_attribute, weights)

    def restrict_to_classes(self, class_ids) -> "Dataset":
        """Rows whose class is in ``class_ids``; attribute specs unchanged."""
        mask = np.isin(self.class_indices(), np.asarray(list(class_ids), dtype=np.intp))
        return self.subset(np.flatnonzero(mask))

    def relabel_binary(self, side_one, names: tuple[str, str] = ("s1", "s2")) -> "Dataset":
        """Replace the class attribute with a two-valued one: instances whose
        class is in ``side_one`` get label 0, the rest label 1."""
        side_one = np.asarray(sorted(side_one), dtype=np.intp)
        y = self.class_indices()
        binary = np.where(np.isin(y, side_one), 0.0, 1.0)
        attrs = list(self.attributes)
        attrs[self.class_attribute] = AttributeSpec(
            attrs[self.class_attribute].name, names
        )
        values = self.values.copy()
        values[:, self.class_attribute] = binary
        return Dataset(attrs, values, self.class_attribute, self.weights)


# ---------------------------------------------------------------------------
# ARFF
# ---------------------------------------------------------------------------


def _strip_comment(line: str) -> str:
    # '%' starts a comment unless inside quotes
    quote = None
    for i, ch in enumerate(line):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
        elif ch == "%":
            return line[:i]
    return line


def _unquote(token: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    return token


def _split_csv_like(text: str, lineno: int) -> list[str]:
    """Split on commas, honoring single/double quotes."""
    out, buf, quote = [], [], None
    for ch in text:
        if quote:
            buf.append(ch)
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
            buf.append(ch)
        elif ch == ",":
            out.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    if quote:
        raise ParseError(lineno, "unterminated quote")
    out.append("".join(buf))
    return out


def _parse_attribute_decl(rest: str, lineno: int) -> AttributeSpec:
    rest = rest.strip()
    if not rest:
        raise ParseError(lineno, "@attribute without a name")
    if rest[0] in "'\"":
        end = rest.find(rest[0], 1)
        if end < 0:
            raise ParseError(lineno, "unterminated quoted attribute name")
        name = rest[1:end]
        kind = rest[end + 1 :].strip()
    else:
        parts = rest.split(None, 1)
        if len(parts) < 2:
            raise ParseError(lineno, "attribute declaration missing a type")
        name, kind = parts[0], parts[1].strip()
    if not kind:
        raise ParseError(lineno, "attribute declaration missing a type")
    if kind.startswith("{"):
        if not kind.endswith("}"):
            raise ParseError(lineno, "unterminated nominal value list")
        raw = _split_csv_like(kind[1:-1], lineno)
        vals = tuple(_unquote(v) for v in raw)
        if any(v == "" for v in vals):
            raise ParseError(lineno, "empty nominal value")
        try:
            return AttributeSpec(name, vals)
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from None
    kind_word = kind.split()[0].split("[")[0].lower()
    if kind_word in _NUMERIC_KINDS:
        return AttributeSpec(name, None)  # any [lo,hi] range hint is ignored
    if kind_word in _UNSUPPORTED_KINDS:
        raise UnsupportedFeature(lineno, f"{kind_word} attributes are not supported")
    raise ParseError(lineno, f"unknown attribute type {kind!r}")


def parse_arff(text: str) -> Dataset:
    """Parse ARFF text into a Dataset.

    The class attribute is the last nominal attribute in declaration
    order.  Raises ParseError / UnsupportedFeature / MissingValue with the
    offending line number, EmptyInput when no data rows are present.
    """
    attributes: list[AttributeSpec] = []
    rows: list[list[float]] = []
    in_data = False
    saw_relation = False

    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if not in_data and line.startswith("@"):
            word = line.split(None, 1)[0].lower()
            rest = line[len(word) :].strip()
            if word == "@relation":
                saw_relation = True
            elif word == "@attribute":
                attributes.append(_parse_attribute_decl(rest, lineno))
            elif word == "@data":
                if not saw_relation:
                    raise ParseError(lineno, "@data before @relation")
                if not attributes:
                    raise ParseError(lineno, "@data with no attributes declared")
                in_data = True
            else:
                raise ParseError(lineno, f"unknown declaration {word!r}")
            continue
        if not in_data:
            raise ParseError(lineno, "data row before @data section")
        if line.startswith("{"):
            raise UnsupportedFeature(lineno, "sparse ARFF rows are not supported")
        rows.append(_parse_data_row(line, attributes, lineno))

    if not in_data:
        raise ParseError(len(lines) or 1, "no @data section")
    if not rows:
        raise EmptyInput("ARFF input has no data rows")
    return _finish_dataset(attributes, rows, class_attribute=_last_nominal(attributes))


def _last_nominal(attributes: list[AttributeSpec]) -> int:
    for j in range(len(attributes) - 1, -1, -1):
        if attributes[j].is_nominal:
            return j
    raise EmptyInput("no nominal attribute to use as the class")


def _parse_data_row(
    line: str, attributes: list[AttributeSpec], lineno: int
) -> list[float]:
    fields = _split_csv_like(line, lineno)
    if len(fields) != len(attributes):
        raise ParseError(
            lineno, f"expected {len(attributes)} values, found {len(fields)}"
        )
    row = []
    for spec, tok in zip(attributes, fields):
        tok = _unquote(tok)
        if tok == "?":
            raise MissingValue(lineno, f"missing value for attribute {spec.name!r}")
        if spec.is_nominal:
            try:
                row.append(float(spec.values.index(tok)))
            except ValueError:
                raise ParseError(
                    lineno, f"value {tok!r} not declared for attribute {spec.name!r}"
                ) from None
        else:
            try:
                row.append(float(tok))
            except ValueError:
                raise ParseError(
                    lineno, f"non-numeric value {tok!r} for attribute {spec.name!r}"
                ) from None
    return row


def _finish_dataset(attributes, rows, class_attribute: int) -> Dataset:
    values = np.asarray(rows, dtype=np.float64)
    return Dataset(attributes, values, class_attribute)


def _quote_if_needed(name: str) -> str:
    if name and not any(c in name for c in " ,{}%'\"\t"):
        return name
    return "'" + name + "'"


def serialize_arff(d: Dataset, relation: str = "dataset") -> str:
    """Inverse of parse_arff on attribute structure and instance values."""
    out = [f"@relation {_quote_if_needed(relation)}"]
    for spec in d.attributes:
        if spec.is_nominal:
            vals = ",".join(_quote_if_needed(v) for v in spec.values)
            out.append(f"@attribute {_quote_if_needed(spec.name)} {{{vals}}}")
        else:
            out.append(f"@attribute {_quote_if_needed(spec.name)} numeric")
    out.append("@data")
    for i in range(d.n_instances):
        cells = []
        for j, spec in enumerate(d.attributes):
            v = d.values[i, j]
            if spec.is_nominal:
                cells.append(_quote_if_needed(spec.values[int(v)]))
            else:
                cells.append(repr(float(v)))
        out.append(",".join(cells))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def parse_csv(text: str, class_column: int, header: bool = False) -> Dataset:
    """Parse comma-separated text.

    A column is numeric iff every value parses as a real number; anything
    else (including the class column, always) is nominal with values
    ordered by first appearance.
    """
    import csv as _csv
    import io

    reader = _csv.reader(io.StringIO(text))
    raw_rows = [(i + 1, row) for i, row in enumerate(reader) if row]
    if not raw_rows:
        raise EmptyInput("CSV input has no rows")

    names = None
    if header:
        names = [c.strip() for c in raw_rows[0][1]]
        raw_rows = raw_rows[1:]
        if not raw_rows:
            raise EmptyInput("CSV input has a header but no data rows")

    width = len(raw_rows[0][1])
    for lineno, row in raw_rows:
        if len(row) != width:
            raise ParseError(lineno, f"expected {width} fields, found {len(row)}")
    if not -width <= class_column < width:
        raise ParseError(raw_rows[0][0], f"class column {class_column} out of range")
    class_column %= width
    if names is None:
        names = [f"col{j}" for j in range(width)]

    cols = [[row[j].strip() for _, row in raw_rows] for j in range(width)]
    for lineno, row in raw_rows:
        for cell in row:
            if cell.strip() == "?":
                raise MissingValue(lineno, "missing value")

    attributes = []
    values = np.empty((len(raw_rows), width))
    for j in range(width):
        numeric = j != class_column and _all_numeric(cols[j])
        if numeric:
            attributes.append(AttributeSpec(names[j], None))
            values[:, j] = [float(v) for v in cols[j]]
        else:
            seen: dict[str, int] = {}
            for v in cols[j]:
                seen.setdefault(v, len(seen))
            attributes.append(AttributeSpec(names[j], tuple(seen)))
            values[:, j] = [seen[v] for v in cols[j]]
    return Dataset(attributes, values, class_column)


def _all_numeric(col) -> bool:
    for v in col:
        try:
            float(v)
        except ValueError:
            return False
    return True


# ---------------------------------------------------------------------------
# Folding and resampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FoldPlan:
    """Stratified fold assignments for repeated cross-validation.

    ``assignments[r][f]`` holds the instance indices of fold ``f`` in
    repeat ``r``.  Within each repeat the folds partition all indices and
    per-fold class counts are within one of proportional.
    """

    k: int
    repeats: int
    master_seed: int
    assignments: tuple[tuple[np.ndarray, ...], ...]
    fingerprint: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.fingerprint:
            import hashlib

            h = hashlib.sha256()
            h.update(f"{self.k},{self.repeats},{self.master_seed}".encode())
            for rep in self.assignments:
                for fold in rep:
                    h.update(np.asarray(fold, dtype=np.int64).tobytes())
            object.__setattr__(self, "fingerprint", h.hexdigest()[:16])


def stratified_folds(d: Dataset, k: int, repeats: int, seed: int) -> FoldPlan:
    """Stratified fold plan: per class, indices are shuffled and the
    concatenated (class-major) list is dealt round-robin over the k folds.

    Per-class fold counts end up within 1 of each other, and overall fold
    sizes within 1 of n/k.  Deterministic in (d, k, repeats, seed).
    """
    n = d.n_instances
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    if k > n:
        raise InvalidK(f"k={k} exceeds the instance count {n}")
    if repeats < 1:
        raise InvalidK(f"repeats must be >= 1, got {repeats}")
    y = d.class_indices()
    per_class = [np.flatnonzero(y == c) for c in range(d.n_classes)]

    all_repeats = []
    for r in range(repeats):
        rng = rng_from(seed, r)
        order = np.concatenate([rng.permutation(idx) for idx in per_class if len(idx)])
        folds = [order[f::k] for f in range(k)]
        all_repeats.append(tuple(np.sort(f) for f in folds))
    return FoldPlan(k, repeats, seed, tuple(all_repeats))


def train_test_split(d: Dataset, plan: FoldPlan, repeat: int, fold: int):
    """Train/test datasets for one CV run."""
    test_idx = plan.assignments[repeat][fold]
    mask = np.ones(d.n_instances, dtype=bool)
    mask[test_idx] = False
    return d.subset(np.flatnonzero(mask)), d.subset(test_idx)


def bootstrap_sample(d: Dataset, seed: int) -> Dataset:
    """Uniform sample of n instances with replacement."""
    n = d.n_instances
    if n == 0:
        raise EmptyInput("cannot bootstrap an empty dataset")
    rng = rng_from(seed)
    return d.subset(rng.integers(0, n, size=n))


def weighted_resample(d: Dataset, weights, size: int, seed: int) -> Dataset:
    """Sample ``size`` instances with replacement, probability proportional
    to weight; the returned instances all have weight 1."""
    n = d.n_instances
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (n,):
        raise ValueError("weights length does not match the dataset")
    if np.any(~np.isfinite(weights)) or np.any(weights < 0):
        raise ValueError("weights must be finite and >= 0")
    total = weights.sum()
    if total <= 0:
        raise DegenerateWeights("all resampling weights are zero")
    rng = rng_from(seed)
    idx = rng.choice(n, size=size, replace=True, p=weights / total)
    sample = d.subset(idx)
    return sample.with_weights(np.ones(size))
