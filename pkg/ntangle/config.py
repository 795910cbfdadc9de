"""
Runtime settings.

Numerical tolerances live next to the code that uses them; this module only
holds what a user changes from the environment.
"""
import os

from pydantic import BaseModel, Field


DEFAULT_SEED = 7


class Settings(BaseModel):
    default_seed: int = Field(default=DEFAULT_SEED, description="seed used when --seed is not given")
    workers: int | None = Field(default=None, ge=1, description="thread count for trial fan-out (None: executor default)")


def load_settings(environ: dict[str, str] | None = None) -> Settings:
    environ = os.environ if environ is None else environ
    values = {}
    if environ.get("NTANGLE_SEED"):
        values["default_seed"] = environ["NTANGLE_SEED"]
    if environ.get("NTANGLE_WORKERS"):
        values["workers"] = environ["NTANGLE_WORKERS"]
    return Settings.model_validate(values)
