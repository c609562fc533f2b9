"""Error type carrying a short machine-readable code."""


class BstLabError(Exception):
    """Raised for contract violations; ``code`` is a stable short string."""

    def __init__(self, code, message=""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)
