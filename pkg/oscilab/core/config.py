from __future__ import annotations

import copy as copylib
import os

from pathlib import Path
from typing import Any, Dict, ItemsView, KeysView, Optional, TypeVar, Union, TYPE_CHECKING

import yaml

from .errors import InvalidArgument
from .models import getLogger


if TYPE_CHECKING:
    from .ode import IntegratorConfig


__all__ = (
    "BaseConfig",
    "Config",
    "ENV_CONFIG",
    "ENV_SEED",
)


logger = getLogger(__name__)

TypeT = TypeVar("TypeT")
DataT = Dict[str, Any]

ENV_SEED = "OSCILAB_SEED"
ENV_CONFIG = "OSCILAB_CONFIG"


_default_config: DataT = {
    "margin": 0.01,
    "node_strategy": "chebyshev",
    "node_grid_bits": 16,
    "rtol": 1e-10,
    "atol": 1e-12,
    "max_step": 1e-2,
    "initial_step": 1e-3,
    "zero_tol": 1e-8,
    "enclosure_tol": 1e-6,
    "certificate_tol_factor": 0.25,
    "epsilon": 0.1,
    "delta": 0.01,
    "trials": 1000,
    "n_max": 4,
    "seed": 42,
    "d_max": 10,
    "jobs": 1,
}

_types = {
    "margin": float,
    "node_strategy": str,
    "node_grid_bits": int,
    "rtol": float,
    "atol": float,
    "max_step": float,
    "initial_step": float,
    "zero_tol": float,
    "enclosure_tol": float,
    "certificate_tol_factor": float,
    "epsilon": float,
    "delta": float,
    "trials": int,
    "n_max": int,
    "seed": int,
    "d_max": int,
    "jobs": int,
}


class BaseConfig:
    """
    Represents a dictionary-like base config to store and manage configurations.

    Parameters
    -----------
    defaults : DataT
        A dictionary containing the default key value pairs.
    """

    def __init__(self, *, defaults: DataT = None):
        if defaults is not None:
            if not isinstance(defaults, dict):
                raise TypeError(
                    "Invalid type for defaults parameter. "
                    f"Expected dict, got {defaults.__class__.__name__} instead."
                )
        self.defaults: Optional[DataT] = self.deepcopy(defaults) if defaults is not None else None
        self._cache: DataT = {}

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} cache={self._cache}>"

    def __setitem__(self, key: str, item: Any) -> None:
        if not isinstance(key, str):
            raise TypeError(f"Expected str object for parameter key, got {type(key).__name__} instead.")
        self._cache[key] = item

    def __getitem__(self, key: str) -> Any:
        return self._cache[key]

    def __delitem__(self, key: str) -> None:
        del self._cache[key]

    def __contains__(self, key: str) -> bool:
        return key in self._cache

    def set(self, key: str, item: Any) -> None:
        """
        Sets an item.
        """
        return self.__setitem__(key, item)

    def get(self, key: str, default: TypeT = None) -> Union[Any, TypeT]:
        """
        Gets an item from config.
        """
        return self._cache.get(key, default)

    def remove(self, key: str, *, restore_default: bool = False) -> None:
        """
        Removes item from config.
        """
        self.__delitem__(key)
        if restore_default:
            self._cache[key] = self.deepcopy(self.defaults[key])

    def keys(self) -> KeysView[str]:
        return self._cache.keys()

    def items(self) -> ItemsView[str, Any]:
        return self._cache.items()

    @staticmethod
    def deepcopy(obj: TypeT) -> TypeT:
        """
        Returns a deep copy of object.
        """
        return copylib.deepcopy(obj)

    def _resolve_defaults(self) -> None:
        """
        Copies every default key missing from the cache into it.
        """
        for key, value in (self.defaults or {}).items():
            if key not in self._cache:
                self._cache[key] = self.deepcopy(value)


class Config(BaseConfig):
    """
    Run configuration: the default table, overridden by a YAML file, overridden by
    explicit values (command line options).

    Values are coerced to the type of their default on `set`, unknown keys raise `KeyError`.
    """

    def __init__(self, data: Optional[DataT] = None):
        super().__init__(defaults=_default_config)
        data = self.deepcopy(data) if data else {}
        for key, value in data.items():
            self.set(key, value)
        self._resolve_defaults()

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> Config:
        """
        Loads overrides from a YAML mapping; keys missing from the file keep their defaults.
        """
        path = Path(path)
        try:
            with path.open(encoding="utf-8") as fp:
                data = yaml.safe_load(fp)
        except OSError as exc:
            raise InvalidArgument(f"Cannot read config file {str(path)!r}: {exc}.") from exc
        except yaml.YAMLError as exc:
            raise InvalidArgument(f"Config file {str(path)!r} is not valid YAML.") from exc
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise InvalidArgument(f"Config file {str(path)!r} must hold a mapping.")
        logger.debug(f"Loaded {len(data)} config override(s) from {path}.")
        return cls(data)

    @classmethod
    def from_env(cls, path: Optional[Union[str, Path]] = None) -> Config:
        """
        Config from the YAML file at `path`, or the one named by `OSCILAB_CONFIG` when `path`
        is not given, with `OSCILAB_SEED` applied when set.
        """
        path = path or os.getenv(ENV_CONFIG)
        config = cls.from_file(path) if path else cls()
        seed = os.getenv(ENV_SEED)
        if seed:
            config.set("seed", seed)
        return config

    def set(self, key: str, item: Any) -> None:
        key = key.lower().replace("-", "_")
        if key not in _default_config:
            raise KeyError(f"{key} is invalid key.")
        caster = _types[key]
        try:
            if caster is int and isinstance(item, float) and not item.is_integer():
                raise ValueError
            item = caster(item)
        except (TypeError, ValueError):
            raise InvalidArgument(f"Invalid value {item!r} for config key {key}.")
        return super().set(key, item)

    def get(self, key: str, default: Any = None) -> Any:
        key = key.lower().replace("-", "_")
        if key not in _default_config:
            raise KeyError(f"{key} is invalid key.")
        if key not in self._cache:
            self._cache[key] = self.deepcopy(_default_config[key])
        return self._cache[key]

    def update(self, overrides: DataT) -> None:
        """Applies every override whose value is not `None`."""
        for key, value in overrides.items():
            if value is not None:
                self.set(key, value)

    def integrator_config(self) -> IntegratorConfig:
        from .ode import IntegratorConfig

        return IntegratorConfig(
            rtol=self.get("rtol"),
            atol=self.get("atol"),
            max_step=self.get("max_step"),
            initial_step=self.get("initial_step"),
        )
