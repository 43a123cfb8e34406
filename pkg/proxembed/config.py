"""Pipeline configuration.

A :class:`PipelineConfig` names one (proximity, nonlinearity, embedding)
combination plus optional multiscale scales. Configurations come from
named presets, flat ``key = value`` files with dotted keys
(``proximity.name = hk``) and command-line overrides, applied in that
order. ``to_flat``/``from_flat`` round-trip a configuration through the
string form written into output headers.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, Dict, Iterable, Literal, Mapping, Optional, Tuple, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from .exceptions import ConfigError
from .nonlinearity import parse_filter
from .proximity import SCALE_PARAMETER, Operator, parse_operator

logger = logging.getLogger(__name__)

DEFAULT_DIMENSIONS = {"svd": 128, "cfs": 50, "diag": 1}
INTEGER_SCALES = {"T", "k"}


class ProximityConfig(BaseModel):
	model_config = ConfigDict(frozen=True, extra="forbid")

	name: str = "hk"
	T: int = 10
	b: float = 1.0
	s: float = 0.1
	a: Optional[float] = None
	c: Optional[float] = None
	fabp_c2: Literal["squared", "trace"] = "squared"
	beta: float = 0.01
	normalized: bool = False
	k: int = 1

	@field_validator("name")
	@classmethod
	def _known_operator(cls, value: str) -> str:
		return parse_operator(value).value

	@property
	def operator(self) -> Operator:
		return Operator(self.name)

	def params(self) -> Dict[str, Any]:
		"""Keyword parameters relevant to the selected operator."""

		op = self.operator
		if op is Operator.PPMI:
			return {"T": self.T, "b": self.b}
		if op is Operator.HK:
			return {"s": self.s}
		if op is Operator.FABP:
			return {"a": self.a, "c": self.c, "fabp_c2": self.fabp_c2}
		if op is Operator.PPR:
			return {"beta": self.beta, "normalized": self.normalized}
		if op in (Operator.ADJ_POW, Operator.RW_POW):
			return {"k": self.k}
		return {}


class FilterConfig(BaseModel):
	model_config = ConfigDict(frozen=True, extra="forbid")

	name: Literal["identity", "log", "bin"] = "identity"
	percentile: Optional[float] = None

	@model_validator(mode="before")
	@classmethod
	def _split_spec(cls, data: Any) -> Any:
		# accepts "bin:5" in the name field
		if isinstance(data, dict) and isinstance(data.get("name"), str):
			name, percentile = parse_filter(data["name"])
			data = dict(data)
			data["name"] = name
			if percentile is not None and data.get("percentile") is None:
				data["percentile"] = percentile
		return data

	@model_validator(mode="after")
	def _check_percentile(self) -> "FilterConfig":
		if self.name == "bin":
			if self.percentile is None or not 0 <= self.percentile < 100:
				raise ValueError("bin filter needs a percentile in [0, 100)")
		elif self.percentile is not None:
			raise ValueError(f"percentile only applies to the bin filter, not '{self.name}'")
		return self

	def spec(self) -> str:
		return f"bin:{self.percentile:g}" if self.name == "bin" else self.name


class EmbeddingConfig(BaseModel):
	model_config = ConfigDict(frozen=True, extra="forbid")

	name: Literal["svd", "cfs", "diag"] = "cfs"
	dimension: int = 50
	normalize: bool = True
	landmark_max: float = 100.0
	include_zero: bool = False

	@model_validator(mode="before")
	@classmethod
	def _default_dimension(cls, data: Any) -> Any:
		if isinstance(data, dict):
			data = dict(data)
			name = str(data.get("name", "cfs")).strip().lower()
			data["name"] = name
			if name == "diag":
				if data.get("dimension") not in (None, 1, "1"):
					logger.warning("diag embedding has width 1 per scale; ignoring dimension=%s", data["dimension"])
				data["dimension"] = 1
			elif data.get("dimension") is None:
				data["dimension"] = DEFAULT_DIMENSIONS.get(name, 50)
		return data

	@model_validator(mode="after")
	def _check_dimension(self) -> "EmbeddingConfig":
		if self.dimension < 1:
			raise ValueError(f"embedding dimension must be >= 1, got {self.dimension}")
		if self.name == "cfs" and self.dimension % 2:
			raise ValueError(f"cfs embedding needs an even dimension, got {self.dimension}")
		if self.landmark_max <= 0:
			raise ValueError("landmark_max must be positive")
		return self


class PipelineConfig(BaseModel):
	"""One point of the proximity x nonlinearity x embedding design space."""

	model_config = ConfigDict(frozen=True, extra="forbid")

	proximity: ProximityConfig = ProximityConfig()
	nonlinearity: FilterConfig = FilterConfig()
	embedding: EmbeddingConfig = EmbeddingConfig()
	scales: Optional[Tuple[float, ...]] = None
	seed: int = 42
	n_jobs: int = 1

	@model_validator(mode="after")
	def _check_scales(self) -> "PipelineConfig":
		if self.scales is None:
			return self
		if not self.scales:
			raise ValueError("scales must be non-empty when given")
		parameter = SCALE_PARAMETER.get(self.proximity.operator)
		if parameter is None:
			raise ValueError(f"{self.proximity.operator.label} has no scale parameter; multiscale is not available")
		if parameter in INTEGER_SCALES and any(value < 1 or value != int(value) for value in self.scales):
			raise ValueError(f"scales for {parameter} must be integers >= 1, got {self.scales}")
		return self

	@property
	def scale_parameter(self) -> Optional[str]:
		return SCALE_PARAMETER.get(self.proximity.operator)

	@property
	def is_multiscale(self) -> bool:
		return self.scales is not None

	def proximity_params(self, scale: Optional[float] = None) -> Dict[str, Any]:
		"""Operator keyword parameters, with the scale parameter set to ``scale``."""

		params = self.proximity.params()
		if scale is not None and self.scale_parameter is not None:
			key = self.scale_parameter
			params[key] = int(scale) if key in INTEGER_SCALES else float(scale)
		return params

	@property
	def output_width(self) -> int:
		return self.embedding.dimension * (len(self.scales) if self.scales else 1)

	def to_flat(self) -> Dict[str, str]:
		"""Dotted-key string form; ``from_flat`` reverses it exactly."""

		flat: Dict[str, str] = {}
		for section in ("proximity", "nonlinearity", "embedding"):
			model = getattr(self, section)
			for key, value in model.model_dump().items():
				if value is None:
					continue
				flat[f"{section}.{key}"] = _format_value(value)
		if self.scales is not None:
			flat["scales"] = ",".join(_format_value(value) for value in self.scales)
		flat["seed"] = str(self.seed)
		flat["n_jobs"] = str(self.n_jobs)
		return flat

	@classmethod
	def from_flat(cls, flat: Mapping[str, str]) -> "PipelineConfig":
		nested: Dict[str, Any] = {}
		for raw_key, raw_value in flat.items():
			key = raw_key.strip()
			value = raw_value.strip() if isinstance(raw_value, str) else raw_value
			if key == "scales":
				nested["scales"] = _parse_scales(value)
			elif "." in key:
				section, _, field = key.partition(".")
				nested.setdefault(section, {})[field] = None if value in ("", "none", "None") else value
			else:
				nested[key] = value
		return build(nested)

	def to_header(self) -> str:
		return " ".join(f"{key}={value}" for key, value in self.to_flat().items())

	@classmethod
	def from_header(cls, header: str) -> "PipelineConfig":
		flat: Dict[str, str] = {}
		for token in header.split():
			key, sep, value = token.partition("=")
			if not sep:
				raise ConfigError(f"Malformed config header token '{token}'")
			flat[key] = value
		return cls.from_flat(flat)

	def describe(self) -> str:
		swept = self.scale_parameter if self.scales else None
		params = ",".join(f"{k}={v}" for k, v in self.proximity.params().items() if v is not None and k != swept)
		scales = f" scales={list(self.scales)}" if self.scales else ""
		return f"{self.proximity.operator.label}({params}) | {self.nonlinearity.spec()} | {self.embedding.name}(d={self.embedding.dimension}){scales}"


def _format_value(value: Any) -> str:
	if isinstance(value, bool):
		return "true" if value else "false"
	if isinstance(value, float):
		return repr(value)
	return str(value)


def _parse_scales(value: Any) -> Optional[Tuple[float, ...]]:
	if value is None or (isinstance(value, str) and value.lower() in ("", "none")):
		return None
	if isinstance(value, str):
		try:
			return tuple(float(item) for item in value.split(",") if item.strip())
		except ValueError:
			raise ConfigError(f"Invalid scales '{value}'; expected comma-separated numbers") from None
	return tuple(float(item) for item in value)


def build(data: Mapping[str, Any]) -> PipelineConfig:
	"""Validate a nested mapping, converting validation failures to ConfigError."""

	try:
		return PipelineConfig.model_validate(dict(data))
	except ValidationError as exc:
		messages = "; ".join(f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in exc.errors())
		raise ConfigError(f"Invalid pipeline configuration: {messages}") from exc


PRESETS: Dict[str, Dict[str, str]] = {
	"graphwave": {
		"proximity.name": "hk",
		"proximity.s": "0.1",
		"nonlinearity.name": "identity",
		"embedding.name": "cfs",
		"embedding.dimension": "50",
	},
	"graphwave-multiscale": {
		"proximity.name": "hk",
		"nonlinearity.name": "identity",
		"embedding.name": "cfs",
		"embedding.dimension": "10",
		"scales": "0.01,0.1,1,10,100",
	},
	"netmf": {
		"proximity.name": "ppmi",
		"proximity.T": "10",
		"proximity.b": "1",
		"nonlinearity.name": "log",
		"embedding.name": "svd",
		"embedding.dimension": "128",
	},
	"infinitewalk": {
		"proximity.name": "lap_pinv",
		"nonlinearity.name": "bin:50",
		"embedding.name": "svd",
		"embedding.dimension": "128",
	},
	"hope": {
		"proximity.name": "ppr",
		"proximity.beta": "0.01",
		"nonlinearity.name": "identity",
		"embedding.name": "svd",
		"embedding.dimension": "128",
	},
	"grarep": {
		"proximity.name": "adj_pow",
		"nonlinearity.name": "log",
		"embedding.name": "svd",
		"embedding.dimension": "32",
		"scales": "1,2,3,4",
	},
	"netlsd": {
		"proximity.name": "hk",
		"nonlinearity.name": "identity",
		"embedding.name": "diag",
		"scales": "0.01,0.1,1,10,100",
	},
	"retgk": {
		"proximity.name": "rw_pow",
		"nonlinearity.name": "identity",
		"embedding.name": "diag",
		"scales": "1,2,3,4,5",
	},
}


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
	"""Read ``key = value`` lines; ``#`` starts a comment."""

	path = Path(path)
	if not path.exists():
		raise ConfigError(f"Config file not found: {path}")
	flat: Dict[str, str] = {}
	for line_number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
		stripped = line.split("#", 1)[0].strip()
		if not stripped:
			continue
		key, sep, value = stripped.partition("=")
		if not sep or not key.strip():
			raise ConfigError(f"{path}:{line_number}: expected 'key = value'")
		flat[key.strip()] = value.strip()
	return flat


def load_config(
	preset: Optional[str] = None,
	path: Optional[Union[str, Path]] = None,
	overrides: Optional[Mapping[str, Any]] = None,
	defaults: Optional[Mapping[str, Any]] = None,
) -> PipelineConfig:
	"""Merge defaults, preset, file and override keys (later wins) into a config."""

	flat: Dict[str, Any] = dict(defaults or {})
	if preset is not None:
		key = preset.strip().lower()
		if key not in PRESETS:
			raise ConfigError(f"Unknown preset '{preset}'. Expected one of: {', '.join(sorted(PRESETS))}.")
		flat.update(PRESETS[key])
	if path is not None:
		flat.update(read_config_file(path))
	if overrides:
		flat.update({key: value for key, value in overrides.items() if value is not None})
	config = PipelineConfig.from_flat({key: str(value) if not isinstance(value, str) else value for key, value in flat.items()})
	logger.info("Pipeline config: %s", config.describe())
	return config


class Settings(BaseModel):
	"""Runtime settings read from the environment (and a ``.env`` file)."""

	model_config = ConfigDict(frozen=True)

	n_jobs: int = 1
	log_level: str = "INFO"

	@classmethod
	def from_env(cls) -> "Settings":
		load_dotenv()
		try:
			return cls(
				n_jobs=int(os.getenv("PROXEMBED_N_JOBS", "1")),
				log_level=os.getenv("PROXEMBED_LOG_LEVEL", "INFO").upper(),
			)
		except ValueError as exc:
			raise ConfigError(f"Invalid PROXEMBED_* environment setting: {exc}") from exc


__all__: Iterable[str] = [
	"ProximityConfig",
	"FilterConfig",
	"EmbeddingConfig",
	"PipelineConfig",
	"PRESETS",
	"Settings",
	"build",
	"load_config",
	"read_config_file",
]
