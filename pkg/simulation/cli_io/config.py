import sys
from pathlib import Path
from typing import Any, Mapping, Union

from pydantic import ValidationError

from .models import RunConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def config_from_mapping(data: Mapping[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"]) or "<root>"
        if first["type"] == "extra_forbidden":
            raise ConfigError(key, f"unknown key {key!r}") from e
        raise ConfigError(key, first["msg"]) from e


def parse_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except OSError as e:
        raise ConfigError(str(path), f"cannot read config file: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(str(path), f"malformed config: {e}") from e
    return config_from_mapping(data)
