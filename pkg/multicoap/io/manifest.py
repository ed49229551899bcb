import os
import platform
from typing import Any, Dict

import numpy as np
from pydantic import Field

from ..core.schema import Schema
from .. import __version__
from .store import write_json

MANIFEST_NAME = "manifest.json"


class RunManifest(Schema):
    """
    Record of one command invocation: enough to rerun it and obtain the same files
    (single-threaded).
    """

    command: str
    config: Dict[str, Any]
    seeds: Dict[str, Any] = Field(default_factory=dict)
    paths: Dict[str, Any] = Field(default_factory=dict)
    timings: Dict[str, float] = Field(default_factory=dict)
    version: str = __version__
    environment: Dict[str, str] = Field(
        default_factory=lambda: {"python": platform.python_version(), "numpy": np.__version__}
    )

    def write(self, directory: str) -> str:
        return write_json(os.path.join(directory, MANIFEST_NAME), self.model_dump(mode="json"))
