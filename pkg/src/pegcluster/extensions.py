"""Typed extension maps attached to parse states and expressions."""

from enum import Enum
from typing import cast

from pegcluster.exceptions import GrammarError


class Absent(Enum):
    """Marker returned when an extension key holds no value."""

    ABSENT = "absent"


ABSENT = Absent.ABSENT


class ExtensionKey[T]:
    """Registered key for a value of type ``T`` in an :class:`ExtensionMap`."""

    __slots__ = ("name",)

    def __init__(self, name: str) -> None:
        self.name = name

    def __repr__(self) -> str:
        return f"ExtensionKey({self.name!r})"


class ExtensionMap:
    """Small keyed store for data owned by custom expressions."""

    __slots__ = ("_values", "_frozen")

    def __init__(self) -> None:
        self._values: dict[str, object] = {}
        self._frozen = False

    def get[T](self, key: ExtensionKey[T]) -> T | Absent:
        """Return the value stored under ``key`` or :data:`ABSENT`."""
        if key.name not in self._values:
            return ABSENT
        return cast(T, self._values[key.name])

    def set[T](self, key: ExtensionKey[T], value: T) -> None:
        """Store ``value`` under ``key``."""
        if self._frozen:
            raise GrammarError(
                f"extension {key.name} cannot change once the grammar is built"
            )
        self._values[key.name] = value

    def freeze(self) -> "ExtensionMap":
        """Return an immutable copy of this map."""
        frozen = ExtensionMap()
        frozen._values = dict(self._values)
        frozen._frozen = True
        return frozen

    @property
    def frozen(self) -> bool:
        """Whether writes are rejected."""
        return self._frozen

    def __len__(self) -> int:
        return len(self._values)


EMPTY_EXTENSIONS = ExtensionMap().freeze()
