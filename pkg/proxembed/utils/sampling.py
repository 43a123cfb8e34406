"""Train/test splitting of labelled nodes.

Provides a reusable helper that splits node indices while preserving the
class distribution whenever every class is large enough to stratify.
"""

from __future__ import annotations

import logging
from typing import Tuple

import numpy as np
from sklearn.model_selection import train_test_split

from ..exceptions import EvaluationError

logger = logging.getLogger(__name__)


def split_nodes(
    labels: np.ndarray,
    train_fraction: float = 0.8,
    random_state: int = 42,
) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``(train_idx, test_idx)`` over ``range(len(labels))``.

    - A stratified split is produced when every class has at least two
      members and both sides can hold one node of each class.
    - Otherwise a plain random split is drawn and a warning is logged.

    The split depends only on ``labels``, ``train_fraction`` and
    ``random_state``.
    """

    if not 0 < train_fraction < 1:
        raise EvaluationError(f"train_fraction must lie in (0, 1), got {train_fraction}")

    labels = np.asarray(labels)
    n = len(labels)
    if n < 2:
        raise EvaluationError(f"Need at least two labelled nodes to split, got {n}")

    indices = np.arange(n)
    classes, counts = np.unique(labels, return_counts=True)
    n_train = int(round(train_fraction * n))
    n_test = n - n_train
    can_stratify = counts.min() >= 2 and min(n_train, n_test) >= len(classes)

    if can_stratify:
        train_idx, test_idx = train_test_split(
            indices,
            train_size=train_fraction,
            stratify=labels,
            random_state=random_state,
        )
        logger.info("Stratified node split: train=%d, test=%d", len(train_idx), len(test_idx))
    else:
        logger.warning("Cannot stratify %d nodes over %d classes; using a random split", n, len(classes))
        train_idx, test_idx = train_test_split(indices, train_size=train_fraction, random_state=random_state)

    return np.sort(train_idx), np.sort(test_idx)
