"""Pydantic field types shared by the report models."""
from typing import Annotated, Any

from pydantic import PlainSerializer, PlainValidator


def _to_complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex value must be [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    try:
        return complex(value)
    except TypeError as e:
        raise ValueError(f"not a complex number: {value!r}") from e


# Complex scalars travel through JSON as [re, im].
ComplexValue = Annotated[
    complex,
    PlainValidator(_to_complex),
    PlainSerializer(lambda z: [z.real, z.imag], return_type=list[float]),
]
