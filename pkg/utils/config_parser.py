# utils/config_parser.py - KEY = VALUE RUN CONFIGURATION FILES

import re
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Union

from loguru import logger
from pydantic import ValidationError

from models.run_config import RunConfig
from utils.exceptions import ConfigError

# Accepted spellings -> RunConfig field
KEY_ALIASES: Dict[str, str] = {
    "case": "case",
    "study": "study",
    "levels": "levels",
    "level": "levels",
    "n": "levels",
    "tau": "tau",
    "N": "steps",
    "steps": "steps",
    "T": "final_time",
    "final_time": "final_time",
    "taus": "taus",
    "output_dir": "output_dir",
    "export_fields": "export_fields",
    "export_energy": "export_energy",
    "export_matrices": "export_matrices",
    "workers": "workers",
    "allow_deep_levels": "allow_deep_levels",
}

LIST_KEYS = {"levels", "taus"}

# "a = 1, b = 2" on one line is split before the next "key ="
_INLINE_SPLIT = re.compile(r",\s*(?=[A-Za-z_]+\s*=)")


def _canonical_key(key: str) -> str:
    key = key.strip()
    if key in KEY_ALIASES:
        return KEY_ALIASES[key]
    if key.lower() in KEY_ALIASES:
        return KEY_ALIASES[key.lower()]
    raise ConfigError(key, "unknown key")


def _parse_list(key: str, value: str) -> List[str]:
    items = [item for item in re.split(r"[\s,]+", value.strip()) if item]
    if not items:
        raise ConfigError(key, "expected at least one value")
    return items


def _parse_tau(key: str, text: str) -> float:
    """Floats, plus 1/1000 and 2^-5 style values"""
    text = text.strip()
    try:
        if "/" in text:
            numerator, denominator = text.split("/", 1)
            return float(numerator) / float(denominator)
        if "^" in text:
            base, exponent = text.split("^", 1)
            return float(base) ** float(exponent)
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(key, f"cannot parse {text!r} as a number")


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Raw key/value pairs of a config file; '#' starts a comment"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(None, f"cannot read config file {path}: {e}")

    values: Dict[str, str] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        for entry in _INLINE_SPLIT.split(line):
            if "=" not in entry:
                raise ConfigError(None, f"{path.name}:{number}: expected 'key = value', got {entry!r}")
            key, value = entry.split("=", 1)
            values[key.strip()] = value.strip()
    return values


def _convert(raw: Mapping[str, str]) -> Dict[str, object]:
    converted: Dict[str, object] = {}
    for key, value in raw.items():
        field = _canonical_key(key)
        if field in LIST_KEYS:
            items = _parse_list(key, value)
            if field == "taus":
                converted[field] = [_parse_tau(key, item) for item in items]
            else:
                converted[field] = items
        elif field == "tau":
            converted[field] = _parse_tau(key, value)
        else:
            converted[field] = value
    return converted


def parse_config(path: Optional[Union[str, Path]] = None, overrides: Optional[Mapping[str, str]] = None) -> RunConfig:
    """
    Build a RunConfig from an optional file and flag overrides.

    Overrides win over file values. Every failure is a ConfigError naming
    the offending key.
    """
    raw: Dict[str, str] = {}
    if path is not None:
        raw.update(read_config_file(path))
    values = _convert(raw)
    values.update(_convert(dict(overrides or {})))

    try:
        config = RunConfig(**values)
    except ValidationError as e:
        error = e.errors()[0]
        original = error.get("ctx", {}).get("error")
        if isinstance(original, ConfigError):
            raise original
        key = str(error["loc"][0]) if error.get("loc") else None
        raise ConfigError(key, error["msg"])

    logger.debug(f"Parsed run configuration: {config.model_dump()}")
    return config
