import uuid
from typing import Any, Dict, Iterator, List

from ..core.errors import ConfigError


class ItemExists(ConfigError):
    __name__ = "ItemExists"
    __desc__ = "Item `{}` already exists in the registry with value `{}`."


class ItemNotFound(ConfigError):
    __name__ = "ItemNotFound"
    __desc__ = "Item `{}` does not exist in the registry. Available: {}"


def generate_id(id_step: int = 1) -> str:
    """
    Generate a unique ID.
    """
    return str(uuid.uuid4())[::id_step]


class Registry:
    """
    Name to object mapping that refuses silent overwrites.
    """

    def __init__(self) -> None:
        self.registry: Dict[str, Any] = {}

    def register(self, key: str, value: Any) -> Any:
        if key in self:
            raise ItemExists(key, self[key])
        self[key] = value
        return value

    def unregister(self, key: str) -> None:
        del self[key]

    def keys(self) -> List[str]:
        return list(self.registry)

    def __getitem__(self, key: str) -> Any:
        if key not in self.registry:
            raise ItemNotFound(key, ", ".join(sorted(self.registry)))
        return self.registry[key]

    def __setitem__(self, key: str, value: Any) -> None:
        self.registry[key] = value

    def __len__(self) -> int:
        return len(self.registry)

    def __delitem__(self, key: str) -> None:
        del self.registry[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self.registry)

    def __contains__(self, key: str) -> bool:
        return key in self.registry

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({sorted(self.registry)})"
