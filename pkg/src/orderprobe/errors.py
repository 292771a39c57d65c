"""Exception types shared across the package."""


class OrderProbeError(Exception):
    """Base class for package errors."""


class DimensionError(OrderProbeError):
    """Tensor shapes incompatible with the requested operation."""


class InvalidMaskError(OrderProbeError):
    """A softmax row has every entry masked out."""


class NumericError(OrderProbeError):
    """Non-finite value where a finite one is required."""


class VocabularyError(OrderProbeError):
    """Token id outside the vocabulary range."""


class InstanceError(OrderProbeError):
    """A reordering instance violates its preconditions."""


class DegenerateSentenceError(OrderProbeError):
    """No single-word move can change the sentence."""


class InputError(OrderProbeError):
    """Malformed or empty input data."""


class AlignmentError(OrderProbeError):
    """A representation dump does not line up with its dataset."""


class ConfigError(OrderProbeError):
    """Invalid or inconsistent configuration."""


class TrainingDiverged(OrderProbeError):
    """Loss became non-finite during training."""

    def __init__(self, step: int, batch_ids: list[int]):
        self.step = step
        self.batch_ids = batch_ids
        super().__init__(
            f"non-finite loss at step {step} (batch instance ordinals: {batch_ids})"
        )
