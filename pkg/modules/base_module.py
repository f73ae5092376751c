"""
Base module class for all analysis modules
"""
from abc import ABC, abstractmethod
from datetime import datetime
from typing import Any, Dict

from config import ESTIMATORS


class BaseModule(ABC):
    """Base class for all analysis modules (estimators, plug-in inversion, decoding)"""

    def __init__(self, module_id: str, name: str, description: str):
        self.module_id = module_id
        self.name = name
        self.description = description
        self.data = None
        self._runs = 0
        self._last_updated = None

    @abstractmethod
    def run(self, *args, **kwargs) -> Any:
        """Run the module on one instance and return its result"""
        pass

    def _record(self, result: Any) -> Any:
        """Keep the latest result for status reporting"""
        self.data = result
        self._runs += 1
        self._last_updated = datetime.now()
        return result

    def get_status(self) -> Dict[str, Any]:
        """Get module status info"""
        return {
            "module_id": self.module_id,
            "has_data": self.data is not None,
            "runs": self._runs,
            "last_updated": self._last_updated
        }


def estimator_entry(module_id: str) -> Dict[str, str]:
    """Constructor arguments for an estimator registered in config.ESTIMATORS"""
    for entry in ESTIMATORS:
        if entry["id"] == module_id:
            return {"module_id": entry["id"], "name": entry["name"], "description": entry["description"]}
    raise KeyError(f"no estimator '{module_id}' in config.ESTIMATORS")
