"""Frozen constants produced by calibration and shipped with the package.

Set WILTONLAB_CONSTANTS to a JSON file to use a different set (for example
one written by ``wiltonlab calibrate``); keys missing there fall back to the
shipped values.
"""
from __future__ import annotations

import json
import os
from functools import lru_cache
from importlib import resources

ENV_VAR = "WILTONLAB_CONSTANTS"


def shipped() -> dict:
    text = resources.files(__package__).joinpath("constants.json").read_text()
    return json.loads(text)


@lru_cache(maxsize=1)
def constants() -> dict:
    values = shipped()
    override = os.environ.get(ENV_VAR)
    if override:
        with open(override, encoding="utf-8") as fh:
            values.update(json.load(fh))
    return values
