"""Exception hierarchy shared by every venuerank module."""


class VenueRankError(Exception):
    """Base class for all package errors."""


class ProfileUnderflow(VenueRankError):
    """The user history has no positively rated venue."""


class EmptyProfile(VenueRankError):
    """No rated venue carries any item of the requested kind."""


class EmptyCorpus(VenueRankError):
    """Every document in a corpus tokenized to nothing."""


class TrainingUnderflow(VenueRankError):
    """Not enough positive training documents to fit a classifier."""


class TrainingDiverged(VenueRankError):
    """The training objective became non-finite."""


class UntrainableDataset(VenueRankError):
    """No query carries two distinct relevance labels."""


class InsufficientQueries(VenueRankError):
    """Fewer distinct queries than cross-validation folds."""


class DataError(VenueRankError):
    """Malformed or inconsistent input data."""


class ModelIntegrityError(VenueRankError):
    """A persisted model failed its checksum or could not be decoded."""


class ModelVersionError(VenueRankError):
    """A persisted model was written by an unsupported format version."""
