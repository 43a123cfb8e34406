"""Downstream model training for embedding evaluation.

This module only builds and fits classifiers; splitting data and scoring
predictions are handled in ``evaluator``.
"""

from __future__ import annotations

import logging
import warnings
from typing import Any, Dict, Iterable, Sequence

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import LogisticRegression
from sklearn.model_selection import GridSearchCV, StratifiedKFold
from sklearn.multiclass import OneVsRestClassifier
from sklearn.pipeline import Pipeline
from sklearn.preprocessing import StandardScaler
from sklearn.svm import LinearSVC

logger = logging.getLogger(__name__)

L2_WEIGHT = 1e-4
LOGISTIC_MAX_ITER = 500
LOGISTIC_TOL = 1e-6
SVM_C_GRID: Sequence[float] = (0.01, 0.1, 1.0, 10.0)
SVM_MAX_ITER = 20000


def build_node_classifier(n_train: int) -> Pipeline:
	"""Standardized one-vs-rest L2 logistic regression.

	The L2 weight 1e-4 on the mean loss corresponds to scikit-learn's
	``C = 1 / (1e-4 * n_train)`` on the summed loss.
	"""

	c = 1.0 / (L2_WEIGHT * max(1, n_train))
	logistic = LogisticRegression(C=c, max_iter=LOGISTIC_MAX_ITER, tol=LOGISTIC_TOL, solver="lbfgs")
	return Pipeline([
		("scale", StandardScaler()),
		("ovr", OneVsRestClassifier(logistic)),
	])


def train_node_classifier(X_train: Any, y_train: Any) -> Pipeline:
	"""Fit the node classifier on standardized embedding rows."""

	X_train = np.asarray(X_train, dtype=float)
	model = build_node_classifier(len(X_train))
	logger.info("Training node classifier: n_train=%d, dim=%d", X_train.shape[0], X_train.shape[1])
	with warnings.catch_warnings():
		warnings.simplefilter("ignore", category=ConvergenceWarning)
		model.fit(X_train, np.asarray(y_train))
	return model


def build_graph_classifier(seed: int = 42, C: float = 1.0) -> Pipeline:
	"""Standardized linear soft-margin SVM with hinge loss."""

	return Pipeline([
		("scale", StandardScaler()),
		("svm", LinearSVC(C=C, loss="hinge", dual=True, max_iter=SVM_MAX_ITER, random_state=seed)),
	])


def tune_graph_classifier(
	X_train: Any,
	y_train: Any,
	seed: int = 42,
	inner_folds: int = 3,
	c_grid: Sequence[float] = SVM_C_GRID,
) -> Dict[str, Any]:
	"""Pick the SVM regularization by inner stratified cross-validation.

	Returns
	-------
	Dict[str, Any]
		{"tuned_model": estimator, "best_params": dict, "best_score": float}
		When a class is too small for inner validation the model is fit with
		``C=1`` and ``best_score`` is NaN.
	"""

	X_train = np.asarray(X_train, dtype=float)
	y_train = np.asarray(y_train)
	_, counts = np.unique(y_train, return_counts=True)
	folds = min(inner_folds, int(counts.min()))

	with warnings.catch_warnings():
		warnings.simplefilter("ignore", category=ConvergenceWarning)
		if folds < 2:
			logger.warning("Smallest class has %d training samples; skipping inner validation", counts.min())
			model = build_graph_classifier(seed)
			model.fit(X_train, y_train)
			return {"tuned_model": model, "best_params": {"svm__C": 1.0}, "best_score": float("nan")}

		search = GridSearchCV(
			build_graph_classifier(seed),
			{"svm__C": list(c_grid)},
			scoring="accuracy",
			cv=StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed),
			n_jobs=1,
		)
		search.fit(X_train, y_train)

	logger.debug("Graph classifier best params %s (inner accuracy %.4f)", search.best_params_, search.best_score_)
	return {
		"tuned_model": search.best_estimator_,
		"best_params": search.best_params_,
		"best_score": float(search.best_score_),
	}


__all__: Iterable[str] = [
	"build_node_classifier",
	"train_node_classifier",
	"build_graph_classifier",
	"tune_graph_classifier",
]
