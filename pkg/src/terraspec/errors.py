"""Error type shared by all terraspec modules.

Every failure carries a short machine-readable ``code`` (kebab-case slug)
next to the human-readable message, so callers and the CLI can branch on
the code without parsing text.
"""

from __future__ import annotations


class TerraspecError(Exception):
    """Raised for any contract violation or unsupported input.

    ``code`` is a stable slug such as ``"lambda-in-S"`` or
    ``"weight-not-positive"``; ``message`` is free-form detail.
    """

    def __init__(self, code: str, message: str = ""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)
