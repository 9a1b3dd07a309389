"""Feed-specific knobs: rights vocabulary mapping and landing-URL prefixes.

Defaults suit an EASY-style feed; real deployments override them with a JSON
file pointed to by ARCHIVE_LENS_CONFIG (or an explicit path).
"""

import json
import os
from dataclasses import dataclass, field

ENV_VAR = "ARCHIVE_LENS_CONFIG"

# Verbatim rights string -> access class name. Unmapped strings fall to Other.
DEFAULT_RIGHTS_MAP = {
    "OPEN_ACCESS": "Open",
    "OPEN_ACCESS_FOR_REGISTERED_USERS": "Open",
    "GROUP_ACCESS": "RestrictedGroup",
    "RESTRICTED_GROUP": "RestrictedGroup",
    "RESTRICTED": "Restricted",
    "RESTRICTED_REQUEST": "Restricted",
    "REQUEST_PERMISSION": "Restricted",
    "NO_ACCESS": "Other",
}

# License-acceptance bookkeeping tokens; kept in raw_rights, never classified.
DEFAULT_IGNORE_TOKENS = ["accept"]


@dataclass
class LensConfig:
    rights_map: dict = field(default_factory=lambda: dict(DEFAULT_RIGHTS_MAP))
    ignore_tokens: list = field(default_factory=lambda: list(DEFAULT_IGNORE_TOKENS))
    resolver_prefix: str = "https://www.persistent-identifier.nl/?identifier="
    ui_prefix: str = "https://easy.dans.knaw.nl/ui/datasets/id/"

    @classmethod
    def from_file(cls, path) -> "LensConfig":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        cfg = cls()
        if "rights_map" in doc:
            cfg.rights_map = {str(k): str(v) for k, v in doc["rights_map"].items()}
        if "ignore_tokens" in doc:
            cfg.ignore_tokens = [str(t) for t in doc["ignore_tokens"]]
        if "resolver_prefix" in doc:
            cfg.resolver_prefix = str(doc["resolver_prefix"])
        if "ui_prefix" in doc:
            cfg.ui_prefix = str(doc["ui_prefix"])
        return cfg

    @classmethod
    def from_env(cls) -> "LensConfig":
        path = os.environ.get(ENV_VAR)
        return cls.from_file(path) if path else cls()
