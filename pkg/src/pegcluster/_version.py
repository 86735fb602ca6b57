"""Package version resolution."""

import tomllib
from functools import cache
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

_PACKAGE_NAME = "pegcluster"
UNKNOWN_VERSION = "unknown"


def _pyproject_path() -> Path:
    """Return pyproject.toml of the source tree this package lives in."""
    return Path(__file__).resolve().parents[2] / "pyproject.toml"


@cache
def _fallback_version() -> str:
    """Read ``project.version`` from pyproject.toml."""
    try:
        with _pyproject_path().open("rb") as handle:
            document: dict[str, object] = tomllib.load(handle)
    except (OSError, tomllib.TOMLDecodeError):
        return UNKNOWN_VERSION
    match document:
        case {"project": {"version": str(value)}}:
            return value
    return UNKNOWN_VERSION


def clear_fallback_version_cache() -> None:
    """Forget the cached pyproject.toml version (for tests)."""
    _fallback_version.cache_clear()


def get_version() -> str:
    """Return the package version, preferring pyproject.toml in a source checkout."""
    if _pyproject_path().is_file():
        from_source = _fallback_version()
        if from_source != UNKNOWN_VERSION:
            return from_source
    try:
        return version(_PACKAGE_NAME)
    except PackageNotFoundError:
        return _fallback_version()
