"""
Artifact Manager Module
=======================
Reads and writes every file the toolkit produces or consumes: embedding
CSVs with provenance headers, matrices, graph feature tables, JSON
reports, edge lists, label files and multi-graph dataset directories.
Embeddings can also be bundled with their config using joblib.

All writers are deterministic: identical inputs give byte-identical files.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import joblib
import numpy as np
import pandas as pd

from ..config import PipelineConfig
from ..embedding import EmbeddingMatrix
from ..exceptions import EdgeListParseError, GraphDataError
from ..graph_core import Graph, load_edge_list

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"
CONFIG_PREFIX = "# config: "
PROVENANCE_PREFIX = "# provenance: "
INDEX_FILE = "index.txt"
LABELS_FILE = "labels.txt"

PathLike = Union[str, Path]


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def save_embedding_csv(
    path: PathLike,
    embedding: EmbeddingMatrix,
    config: Optional[PipelineConfig] = None,
    graph: Optional[Graph] = None,
) -> Path:
    """Write one row per node, keyed by the original node id.

    The file starts with two comment lines: the flat config (re-parsable
    with ``PipelineConfig.from_header``) and the block provenance.

    Parameters
    ----------
    path : PathLike
        Output CSV path; parent directories are created.
    embedding : EmbeddingMatrix
        Node embedding to persist.
    config : PipelineConfig, optional
        Config echoed into the header.
    graph : Graph, optional
        Source graph supplying original node ids.
    """
    path = _prepare(path)
    nodes = [graph.node_id(i) for i in range(embedding.n)] if graph is not None else list(range(embedding.n))
    frame = pd.DataFrame(embedding.matrix, columns=[f"y{j}" for j in range(embedding.dimension)])
    frame.insert(0, "node", nodes)

    provenance = " ; ".join(block.describe() for block in embedding.provenance)
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(CONFIG_PREFIX + (config.to_header() if config is not None else "") + "\n")
        handle.write(PROVENANCE_PREFIX + provenance + "\n")
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    logger.info("Embedding saved: %s (%d x %d)", path, embedding.n, embedding.dimension)
    return path


def load_embedding_csv(path: PathLike) -> Tuple[pd.DataFrame, Optional[PipelineConfig]]:
    """Read an embedding CSV back; returns the table and its parsed config."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Embedding file not found: {path}")

    config = None
    skip = 0
    with path.open("r", encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            skip += 1
            if line.startswith(CONFIG_PREFIX) and line[len(CONFIG_PREFIX):].strip():
                config = PipelineConfig.from_header(line[len(CONFIG_PREFIX):].strip())

    frame = pd.read_csv(path, skiprows=skip)
    if "node" not in frame.columns:
        raise GraphDataError(f"Embedding file {path} has no 'node' column")
    return frame, config


def save_matrix_csv(path: PathLike, matrix: np.ndarray) -> Path:
    """Write a dense matrix without header."""
    path = _prepare(path)
    np.savetxt(path, np.asarray(matrix, dtype=float), fmt=FLOAT_FORMAT, delimiter=",")
    return path


def save_features_csv(
    path: PathLike,
    graph_ids: Sequence[Any],
    features: np.ndarray,
    labels: Optional[Sequence[Any]] = None,
    config: Optional[PipelineConfig] = None,
    baselines: Optional[Mapping[str, np.ndarray]] = None,
) -> Path:
    """Write one row per graph: ``graph_id,label,f0..`` plus baseline columns.

    ``baselines`` maps a column prefix (e.g. ``"netlsd"``) to an
    ``n_graphs x k`` array appended as ``<prefix>0..``.
    """
    path = _prepare(path)
    features = np.asarray(features, dtype=float)
    frame = pd.DataFrame(features, columns=[f"f{j}" for j in range(features.shape[1])])
    if labels is not None:
        frame.insert(0, "label", list(labels))
    frame.insert(0, "graph_id", list(graph_ids))
    for prefix, values in sorted((baselines or {}).items()):
        values = np.asarray(values, dtype=float)
        for j in range(values.shape[1]):
            frame[f"{prefix}{j}"] = values[:, j]

    with path.open("w", encoding="utf-8", newline="") as handle:
        if config is not None:
            handle.write(CONFIG_PREFIX + config.to_header() + "\n")
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("Graph features saved: %s (%d graphs)", path, len(frame))
    return path


def save_table_csv(path: PathLike, frame: pd.DataFrame) -> Path:
    path = _prepare(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def _json_safe(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(key): _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    if isinstance(value, np.ndarray):
        return _json_safe(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return None if np.isnan(value) else value
    return value


def save_report_json(path: PathLike, report: Mapping[str, Any]) -> Path:
    """Write a report dict as JSON with sorted keys."""
    path = _prepare(path)
    with path.open("w", encoding="utf-8") as handle:
        json.dump(_json_safe(dict(report)), handle, indent=2, sort_keys=True)
        handle.write("\n")
    logger.info("Report saved: %s", path)
    return path


def save_edge_list(path: PathLike, graph: Graph) -> Path:
    """Write ``u v`` lines (``u w v`` for weighted graphs) using original ids."""
    path = _prepare(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        for (u, v), w in zip(graph.edges, graph.edge_weights()):
            if graph.is_weighted:
                handle.write(f"{graph.node_id(u)} {w:.12g} {graph.node_id(v)}\n")
            else:
                handle.write(f"{graph.node_id(u)} {graph.node_id(v)}\n")
    return path


def save_labels(path: PathLike, graph: Graph) -> Path:
    """Write ``node_id label`` lines for a labelled graph."""
    if graph.labels is None:
        raise GraphDataError("Graph has no labels to save")
    path = _prepare(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        for node in sorted(graph.labels):
            handle.write(f"{graph.node_id(node)} {graph.labels[node]}\n")
    return path


def save_graph_dataset(
    directory: PathLike,
    graphs: Sequence[Graph],
    labels: Sequence[int],
    graph_ids: Optional[Sequence[str]] = None,
) -> Path:
    """Write a dataset directory: one edge list per graph plus index and label files."""
    directory = Path(directory)
    (directory / "graphs").mkdir(parents=True, exist_ok=True)
    graph_ids = list(graph_ids) if graph_ids is not None else [f"g{i:04d}" for i in range(len(graphs))]
    if len(graph_ids) != len(graphs) or len(labels) != len(graphs):
        raise GraphDataError("graphs, labels and graph_ids must have equal length")

    index_lines: List[str] = []
    label_lines: List[str] = []
    for graph_id, graph, label in zip(graph_ids, graphs, labels):
        relative = f"graphs/{graph_id}.edges"
        save_edge_list(directory / relative, graph)
        index_lines.append(f"{graph_id} {relative}")
        label_lines.append(f"{graph_id} {int(label)}")

    (directory / INDEX_FILE).write_text("\n".join(index_lines) + "\n", encoding="utf-8")
    (directory / LABELS_FILE).write_text("\n".join(label_lines) + "\n", encoding="utf-8")
    logger.info("Graph dataset saved: %s (%d graphs)", directory, len(graphs))
    return directory


def _read_pairs(path: Path) -> List[Tuple[int, str, str]]:
    pairs = []
    for line_number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) != 2:
            raise EdgeListParseError(path, line_number, f"expected 2 tokens, got {len(tokens)}")
        pairs.append((line_number, tokens[0], tokens[1]))
    return pairs


def load_graph_dataset(directory: PathLike) -> Tuple[List[str], List[Graph], Optional[List[int]]]:
    """Read ``index.txt`` (``graph_id path``) and optional ``labels.txt`` (``graph_id label``).

    Returns
    -------
    Tuple[List[str], List[Graph], Optional[List[int]]]
        Graph ids in index order, the graphs, and their labels (``None``
        when the dataset has no label file).
    """
    directory = Path(directory)
    index_path = directory / INDEX_FILE
    if not index_path.exists():
        raise FileNotFoundError(f"Dataset index not found: {index_path}")

    graph_ids: List[str] = []
    graphs: List[Graph] = []
    for _, graph_id, relative in _read_pairs(index_path):
        graph_ids.append(graph_id)
        graphs.append(load_edge_list(directory / relative))

    labels: Optional[List[int]] = None
    labels_path = directory / LABELS_FILE
    if labels_path.exists():
        by_id: Dict[str, int] = {}
        for line_number, graph_id, value in _read_pairs(labels_path):
            try:
                by_id[graph_id] = int(value)
            except ValueError:
                raise EdgeListParseError(labels_path, line_number, f"label must be an integer, got {value!r}") from None
        missing = [graph_id for graph_id in graph_ids if graph_id not in by_id]
        if missing:
            raise GraphDataError(f"Missing labels for graphs: {missing[:5]}")
        labels = [by_id[graph_id] for graph_id in graph_ids]

    logger.info("Graph dataset loaded: %s (%d graphs)", directory, len(graphs))
    return graph_ids, graphs, labels


def save_embedding_bundle(path: PathLike, embedding: EmbeddingMatrix, config: Optional[PipelineConfig] = None) -> Path:
    """Persist an embedding together with its config using joblib."""
    path = _prepare(path)
    payload = {
        "matrix": embedding.matrix,
        "kind": embedding.kind.value,
        "provenance": [block.describe() for block in embedding.provenance],
        "config": config.to_flat() if config is not None else None,
    }
    try:
        joblib.dump(payload, path, protocol=4)
    except Exception as exc:
        logger.error("Failed to save embedding bundle: %s", exc)
        raise
    logger.info("Embedding bundle saved: %s", path)
    return path


def load_embedding_bundle(path: PathLike) -> Dict[str, Any]:
    """Load a bundle saved by :func:`save_embedding_bundle`; the config is re-parsed."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Embedding bundle not found: {path}")
    payload = joblib.load(path)
    if payload.get("config") is not None:
        payload["config"] = PipelineConfig.from_flat(payload["config"])
    return payload
