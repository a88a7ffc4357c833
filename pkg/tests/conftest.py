"""Shared fixtures and dataset builders for the test suite."""

from pathlib import Path

import numpy as np
import pytest

from nested_dichotomies.data import AttributeSpec, Dataset, parse_arff

DATASETS_DIR = Path(__file__).resolve().parents[1] / "datasets"

_cache: dict[str, Dataset] = {}


def load_uci(name: str) -> Dataset:
    """Load (and cache) one of the bundled UCI ARFF files."""
    if name not in _cache:
        path = DATASETS_DIR / f"{name}.arff"
        if not path.exists():
            pytest.fail(
                f"dataset file {path} is missing; run tools/fetch_datasets.py "
                f"or restore the datasets/ directory"
            )
        _cache[name] = parse_arff(path.read_text())
    return _cache[name]


def gaussian_dataset(
    centers,
    per_class: int = 30,
    spread: float = 0.5,
    seed: int = 0,
    class_names=None,
) -> Dataset:
    """Numeric dataset with one spherical Gaussian blob per class."""
    centers = np.asarray(centers, dtype=np.float64)
    n_classes, n_features = centers.shape
    rng = np.random.default_rng(seed)
    rows = []
    for c, center in enumerate(centers):
        points = rng.normal(center, spread, size=(per_class, n_features))
        rows.append(np.column_stack([points, np.full(per_class, float(c))]))
    values = np.vstack(rows)
    if class_names is None:
        class_names = tuple(f"c{i}" for i in range(n_classes))
    attrs = [AttributeSpec(f"x{j}") for j in range(n_features)]
    attrs.append(AttributeSpec("class", tuple(class_names)))
    return Dataset(attrs, values, class_attribute=n_features)


def simple_dataset(xs, labels, class_names=("a", "b")) -> Dataset:
    """1-D two-class dataset from parallel lists."""
    values = np.column_stack([np.asarray(xs, dtype=float), np.asarray(labels, float)])
    attrs = [AttributeSpec("x"), AttributeSpec("class", tuple(class_names))]
    return Dataset(attrs, values, class_attribute=1)


@pytest.fixture(scope="session")
def zoo() -> Dataset:
    return load_uci("zoo")


@pytest.fixture(scope="session")
def glass() -> Dataset:
    return load_uci("glass")


@pytest.fixture(scope="session")
def vowel() -> Dataset:
    return load_uci("vowel")
