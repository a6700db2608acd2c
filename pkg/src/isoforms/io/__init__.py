from .readers import DataReader, DataReaderError
from .validators import PydanticValidator

__all__ = ["DataReader", "DataReaderError", "PydanticValidator"]
