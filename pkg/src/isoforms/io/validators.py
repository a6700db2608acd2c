from typing import Any, Protocol

from pydantic import BaseModel, ValidationError


class DataValidator(Protocol):
    """Protocol for validating loaded data."""

    def validate(self, data: Any) -> Any:
        """Validate and potentially transform the data."""
        ...


class NoOpValidator:
    """Validator that returns data unchanged."""

    def validate(self, data: Any) -> Any:
        return data


class PydanticValidator:
    """Validates loaded data against a document model.

    Schema violations become ``ValueError`` (an I/O problem). Domain errors raised while the
    model builds its mathematical objects are not schema violations and propagate unchanged.
    """

    def __init__(self, model_class: type[BaseModel]) -> None:
        self.model_class = model_class

    def validate(self, data: Any) -> BaseModel:
        try:
            return self.model_class.model_validate(data)
        except ValidationError as e:
            msg = f"Pydantic validation failed: {e}"
            raise ValueError(msg) from e
