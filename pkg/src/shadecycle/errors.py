"""Error taxonomy shared by the CLI exit-code mapping (0 ok, 2 config, 3 data, 4 numeric)."""


class ConfigError(ValueError):
    """Invalid configuration: bad values, unknown keys, inconsistent options."""

    exit_code = 2


class DataError(RuntimeError):
    """Broken or missing data: manifests, channel files, records."""

    exit_code = 3


class NumericError(RuntimeError):
    """Non-finite or otherwise unusable numeric state during training/eval."""

    exit_code = 4
