from typing import Any, Dict

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, PlainSerializer
from typing_extensions import Annotated


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _to_float_array(value: Any) -> np.ndarray:
    return _freeze(np.array(value, dtype=np.float64, copy=True))


def _to_count_array(value: Any) -> np.ndarray:
    arr = np.array(value, copy=True)
    if arr.dtype.kind in "iub":
        return _freeze(arr.astype(np.int64))
    # Floats are kept as floats so validation can report non-integral entries
    arr = arr.astype(np.float64)
    if np.all(np.isfinite(arr)) and np.all(arr == np.round(arr)):
        return _freeze(arr.astype(np.int64))
    return _freeze(arr)


def _to_list(arr: np.ndarray) -> list:
    return arr.tolist()


# Read-only float64 array; serialized as nested lists
FloatArray = Annotated[
    np.ndarray, BeforeValidator(_to_float_array), PlainSerializer(_to_list, return_type=list)
]

# Read-only int64 count array; serialized as nested lists
CountArray = Annotated[
    np.ndarray, BeforeValidator(_to_count_array), PlainSerializer(_to_list, return_type=list)
]


class Schema(BaseModel):
    """
    Frozen pydantic model used for every value object of the package. Array fields are
    copied and made read-only on construction, so instances are safe to share between
    threads.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, extra="forbid")

    def to_dict(self) -> Dict[str, Any]:
        """Serialize to plain Python containers (arrays become nested lists)."""
        return self.model_dump(mode="python")

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "Schema":
        """Inverse of `to_dict`."""
        return cls.model_validate(payload)

    def replace(self, **changes: Any) -> "Schema":
        """Return a validated copy with some fields replaced."""
        payload = dict(self.__dict__)
        payload.update(changes)
        return self.__class__.model_validate(payload)

    @classmethod
    def to_str(cls) -> str:
        """Return a human-readable listing of the fields and their defaults."""
        _str = f"{cls.__name__}:"
        for k, v in cls.model_fields.items():
            annotation = getattr(v.annotation, "__name__", str(v.annotation))
            _str += f"\n- {k}: {annotation}"
            if not v.is_required():
                _str += f" (default: {v.default})"
        return _str
