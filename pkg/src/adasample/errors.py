"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
DivergenceError -> 3, I/O failures -> 4.
"""


class ConfigError(Exception):
    """Invalid or inconsistent run configuration."""


class DataError(Exception):
    """Missing or malformed input data."""


class IdxFormatError(DataError):
    """Malformed IDX binary file; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class DivergenceError(Exception):
    """Training produced a non-finite loss; carries the iteration index."""

    def __init__(self, iteration: int, message: str = "non-finite training loss"):
        super().__init__(f"{message} at iteration {iteration}")
        self.iteration = iteration


class EmptyBucketError(LookupError):
    """A bucket holds no probes / no pool members; callers decide the fallback."""

    def __init__(self, bucket: int, message: str = "bucket is empty"):
        super().__init__(f"{message}: bucket {bucket}")
        self.bucket = bucket
