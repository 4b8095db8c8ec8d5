"""
Config validators
Load experiment configs and turn parse/validation failures into ConfigError
with line/field diagnostics
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

from app.errors import ConfigError

M = TypeVar("M", bound=BaseModel)


class ConfigValidator:
    """Validate experiment configs before running anything"""

    @staticmethod
    def read_json(path: str) -> Dict[str, Any]:
        """
        Parse a JSON config file.

        Raises:
            ConfigError with line and column for syntax errors
        """
        file_path = Path(path)
        if not file_path.exists():
            raise ConfigError(f"Config file not found: {path}", {"path": path})
        text = file_path.read_text(encoding="utf-8")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(
                f"{path}:{e.lineno}:{e.colno}: {e.msg}",
                {"path": path, "line": e.lineno, "column": e.colno},
            ) from e
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top-level value must be an object", {"path": path})
        return data

    @staticmethod
    def validate(model: Type[M], data: Dict[str, Any], source: Optional[str] = None) -> M:
        """Validate a dict against a config model; field errors use dotted paths"""
        try:
            return model.model_validate(data)
        except ValidationError as e:
            problems = []
            for err in e.errors():
                field = ".".join(str(part) for part in err.get("loc", ())) or "<root>"
                problems.append({"field": field, "message": err.get("msg", "invalid")})
            where = f"{source}: " if source else ""
            summary = "; ".join(f"{p['field']}: {p['message']}" for p in problems)
            raise ConfigError(f"{where}{summary}", {"errors": problems}) from e


# Create instance
config_validator = ConfigValidator()
