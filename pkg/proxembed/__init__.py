"""proxembed

Node and graph embeddings built from three interchangeable stages: a node
proximity matrix, an elementwise nonlinearity and an embedding function.
The package exposes a single public entry point, `run_pipeline()`, plus
`PipelineConfig` to describe the method it runs.

Internal modules are considered implementation details and are not part
of the public API.
"""

from .config import PipelineConfig
from .pipeline import run_pipeline

__all__ = ["PipelineConfig", "run_pipeline"]
