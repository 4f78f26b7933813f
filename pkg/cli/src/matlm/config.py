try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from matlm.exceptions import ConfigError

DEFAULT_MU = 2000.0
DEFAULT_LAMBDA = 0.7
DEFAULT_TOPIC_PRODUCT_THRESHOLD = 10_000_000

PATH_KEYS = ("corpus", "queries", "docids", "theta", "phi", "wordmap", "others", "output",
             "diagnostics")


class ScoreMode(str, Enum):
    LOG = "log"
    LINEAR = "linear"


class ModelName(str, Enum):
    LMD = "lmd"
    LBDM = "lbdm"
    LDI = "ldi"


# --------------------------------------
# SMOOTHING
# --------------------------------------


class SmoothConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    mu: float = Field(default=DEFAULT_MU, ge=0.0, allow_inf_nan=False)
    score_mode: ScoreMode = ScoreMode.LOG


class LbdmConfig(SmoothConfig):
    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    lambda_: float = Field(default=DEFAULT_LAMBDA, ge=0.0, le=1.0, alias="lambda")
    # above this many m·n cells θ·φ is applied factored per query
    topic_product_threshold: int = Field(default=DEFAULT_TOPIC_PRODUCT_THRESHOLD, ge=0)


# --------------------------------------
# RUN
# --------------------------------------


class RunConfig(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    model: ModelName
    mu: float = Field(default=DEFAULT_MU, ge=0.0, allow_inf_nan=False)
    lambda_: float = Field(default=DEFAULT_LAMBDA, ge=0.0, le=1.0, alias="lambda")
    score_mode: ScoreMode = ScoreMode.LOG
    top_k: int = Field(default=1000, ge=1)
    run_tag: str = Field(default="matlm", min_length=1, pattern=r"^\S+$")
    topic_product_threshold: int = Field(default=DEFAULT_TOPIC_PRODUCT_THRESHOLD, ge=0)
    logging_level: Optional[str] = Field(
        default=None, pattern=r"(?i)^(debug|info|warning|error|critical)$"
    )
    show_progress: bool = False

    corpus: Path
    queries: Path
    output: Path
    docids: Optional[Path] = None
    theta: Optional[Path] = None
    phi: Optional[Path] = None
    wordmap: Optional[Path] = None
    others: Optional[Path] = None
    diagnostics: Optional[Path] = None

    @model_validator(mode="after")
    def _topic_paths_for_topic_models(self) -> "RunConfig":
        if self.model in (ModelName.LBDM, ModelName.LDI):
            missing = [
                name for name in ("theta", "phi", "wordmap") if getattr(self, name) is None
            ]
            if missing:
                raise ValueError(
                    f"model '{self.model.value}' requires topic parameter paths: "
                    + ", ".join(missing)
                )
        return self

    @property
    def smoothing(self) -> SmoothConfig:
        return SmoothConfig(mu=self.mu, score_mode=self.score_mode)

    @property
    def lbdm(self) -> LbdmConfig:
        return LbdmConfig(
            mu=self.mu,
            score_mode=self.score_mode,
            lambda_=self.lambda_,
            topic_product_threshold=self.topic_product_threshold,
        )

    @property
    def diagnostics_file(self) -> Path:
        if self.diagnostics is not None:
            return self.diagnostics
        return self.output.with_name(self.output.name + ".diagnostics.json")

    @classmethod
    def from_sources(
        cls,
        overrides: dict[str, Any],
        config_path: Union[str, Path, None] = None,
    ) -> "RunConfig":
        """
        Merge a TOML config file with command-line values; non-None overrides win.
        """
        data: dict[str, Any] = {}
        if config_path is not None:
            data.update(load_config_file(config_path))
        data.update({key: value for key, value in overrides.items() if value is not None})
        return cls.model_validate(data)


def load_config_file(path: Union[str, Path]) -> dict[str, Any]:
    path_obj = Path(path)
    try:
        data = tomllib.loads(path_obj.read_text("utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path_obj}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"Config file {path_obj} is not valid TOML: {exc}")

    nested = [key for key, value in data.items() if isinstance(value, dict)]
    if nested:
        raise ConfigError(
            f"Config file {path_obj} must contain flat key = value pairs; "
            f"found tables: {', '.join(nested)}"
        )

    base = path_obj.parent.resolve()
    for key in PATH_KEYS:
        if key in data:
            data[key] = _resolve_path(base, Path(data[key]))
    return data


def _resolve_path(base: Path, value: Path) -> Path:
    return value if value.is_absolute() else (base / value).resolve()
