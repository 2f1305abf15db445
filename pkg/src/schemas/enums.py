from enum import Enum


class ExtractionMethod(str, Enum):
    """
    How an automaton was obtained from a recognizer.

    Values:
        STATE_MERGING: Prefix tree + similarity/consistency merging
        KMEANS: Clustering baseline over hidden states
    """

    STATE_MERGING = "state_merging"
    KMEANS = "kmeans"


class SweepKind(str, Enum):
    """
    Experiment sweeps offered by the ``sweep`` subcommand.

    Values:
        DATA: Accuracy and size vs number of prefix tree strings
        KAPPA: Merged machines for a grid of similarity tolerances
        EPOCHS: Extraction from every per-epoch checkpoint
        SANITY: Prefix tree vs merged automaton held-out accuracy
    """

    DATA = "data"
    KAPPA = "kappa"
    EPOCHS = "epochs"
    SANITY = "sanity"


class TrainingProfile(str, Enum):
    """
    Training presets.

    Values:
        PAPER: 100,000 strings of length 100, 22 epochs
        DESK: 20,000 strings of length 50, 10 epochs
    """

    PAPER = "paper"
    DESK = "desk"
