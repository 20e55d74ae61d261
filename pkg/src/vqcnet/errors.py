"""Exception types shared across the toolkit."""


class SizeError(ValueError):
    """A dimension, qubit count, or buffer length is out of bounds."""


class ConfigError(ValueError):
    """Invalid circuit, model, or experiment configuration."""


class ZeroVectorError(ValueError):
    """A feature vector with (near-)zero norm cannot be amplitude-embedded."""


class LabelError(ValueError):
    """A class label lies outside the configured range."""


class TraceError(RuntimeError):
    """A backward pass received a trace that does not match the live model."""


class FormatError(ValueError):
    """An on-disk binary file violates the tensor container format."""


class ManifestError(ValueError):
    """A dataset manifest is inconsistent with the files it references."""


class SplitError(ValueError):
    """A dataset cannot be split as requested (e.g. too few trials per class)."""
