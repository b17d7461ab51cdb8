from grtkit.io.model_json import (
    dumps,
    dumps_model,
    loads,
    loads_model,
    model_from_dict,
    model_to_dict,
    read_model,
    write_model,
)

__all__ = [
    "dumps",
    "dumps_model",
    "loads",
    "loads_model",
    "model_from_dict",
    "model_to_dict",
    "read_model",
    "write_model",
]
