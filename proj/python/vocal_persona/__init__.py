"""Python bindings for the vocal persona engine."""

import json

from . import _core
from ._core import (
    Bundle,
    ConfigurationError,
    DomainError,
    Error,
    IncomparableError,
    ParseError,
    StorageError,
    UnknownFeatureError,
    UnknownMacroError,
    UnknownPersonaError,
    UnsupportedVersionError,
    ValidationError,
    estimate_syllables,
    macro_factor,
    overlap,
)

__all__ = [
    "Bundle",
    "ConfigurationError",
    "DomainError",
    "Error",
    "IncomparableError",
    "ParseError",
    "Session",
    "StorageError",
    "UnknownFeatureError",
    "UnknownMacroError",
    "UnknownPersonaError",
    "UnsupportedVersionError",
    "ValidationError",
    "apply_macros",
    "blend",
    "estimate_syllables",
    "macro_factor",
    "overlap",
    "sample",
    "synthesize",
]


def apply_macros(bundle, persona_id, macros=None):
    """Effective persona as a dict after applying ``{macro_id: x}``."""
    return json.loads(_core.apply_macros(bundle, persona_id, macros or {}))


def blend(bundle, a, b, alpha):
    return json.loads(_core.blend(bundle, a, b, alpha))


def sample(bundle, persona_id, seed=0, macros=None, count=1):
    """List of ``{feature_id: value}`` dicts for seeds ``seed .. seed+count-1``."""
    rows = _core.sample(bundle, persona_id, seed, macros or {}, count)
    return [dict(zip(bundle.feature_ids, row)) for row in rows]


def synthesize(bundle, persona_id, text, seed=0, macros=None, sample_rate=44100):
    """Returns ``(wav_bytes, {feature_id: value})``."""
    wav, values = _core.synthesize(bundle, persona_id, text, seed, macros or {}, sample_rate)
    return wav, dict(zip(bundle.feature_ids, values))


class Session:
    """Live control state over one bundle."""

    def __init__(self, bundle):
        self._bundle = bundle
        self._core = _core.Session(bundle)

    @property
    def id(self):
        return self._core.id

    def set_macro(self, macro_id, x):
        self._core.set_macro(macro_id, x)

    def select(self, persona_id):
        self._core.select(persona_id)

    def select_blend(self, a, b, alpha):
        self._core.select_blend(a, b, alpha)

    def state(self):
        return json.loads(self._core.state_json())

    def effective(self):
        return json.loads(self._core.effective_json())

    def curves(self, feature_id):
        return json.loads(self._core.curves_json(feature_id))

    def synthesize(self, text, seed=None):
        """Returns ``(wav_bytes, seed, {feature_id: value})``."""
        wav, used, values = self._core.synthesize(text, seed)
        return wav, used, dict(zip(self._bundle.feature_ids, values))
