"""
Elman recurrent recognizer.

This module defines:
- RnnModel: embedding + tanh recurrence + 2-way linear head per position
- ForwardResult / BatchForward: hidden states and acceptance probabilities
- Recognizer: the protocol extraction needs (hidden states + decisions)
- AdamState and Checkpoint containers

The recurrence is h_{i+1} = tanh(U h_i + V x_{i+1}) with h starting at the
zero vector; the first input is the begin-of-sequence token, so hidden row 0
represents the empty string. All arithmetic is float64.
"""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Protocol

import numpy as np

from core.exceptions import InvalidInputError

if TYPE_CHECKING:
    from schemas.results import CheckpointMetadata

BOS = "<bos>"
BOS_INDEX = 0

PARAMETER_NAMES: tuple[str, ...] = (
    "embedding",
    "recurrent_weight",
    "input_weight",
    "head_weight",
    "head_bias",
)


@dataclass(frozen=True, eq=False)
class ForwardResult:
    """
    Output of reading one string.

    Attributes:
        hidden: (n+1) x d hidden states; row i follows the prefix w[:i]
        yhat: n+1 acceptance probabilities, one per prefix
    """

    hidden: np.ndarray
    yhat: np.ndarray


@dataclass(frozen=True, eq=False)
class BatchForward:
    """Padded batch forward pass used by training and bulk evaluation."""

    indices: np.ndarray  # (B, T+1) token indices, column 0 is BOS
    mask: np.ndarray  # (B, T+1) True on real positions
    hidden: np.ndarray  # (B, T+1, d)
    logits: np.ndarray  # (B, T+1, 2)
    yhat: np.ndarray  # (B, T+1)


class Recognizer(Protocol):
    """Anything that exposes hidden states and per-prefix acceptance scores."""

    @property
    def alphabet(self) -> tuple[str, ...]: ...

    @property
    def hidden_dim(self) -> int: ...

    def forward(self, word: str) -> ForwardResult: ...


def accept_probability(logits: np.ndarray) -> np.ndarray:
    """Softmax probability of the accept class (index 1) for 2-logit rows."""
    margin = logits[..., 1] - logits[..., 0]
    return 0.5 * (1.0 + np.tanh(0.5 * margin))


@dataclass(frozen=True, eq=False)
class RnnModel:
    """
    Simple recurrent language recognizer.

    Attributes:
        alphabet: Input tokens; embedding row 0 is reserved for BOS
        embedding: E, shape (|Σ|+1, e)
        recurrent_weight: U, shape (d, d)
        input_weight: V, shape (d, e)
        head_weight: classifier weights, shape (2, d)
        head_bias: classifier bias, shape (2,)
    """

    alphabet: tuple[str, ...]
    embedding: np.ndarray
    recurrent_weight: np.ndarray
    input_weight: np.ndarray
    head_weight: np.ndarray
    head_bias: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        vocab, embed = self.embedding.shape
        hidden = self.recurrent_weight.shape[0]
        expected = {
            "embedding": (len(self.alphabet) + 1, embed),
            "recurrent_weight": (hidden, hidden),
            "input_weight": (hidden, embed),
            "head_weight": (2, hidden),
            "head_bias": (2,),
        }
        for name, shape in expected.items():
            actual = getattr(self, name).shape
            if actual != shape:
                raise InvalidInputError(
                    f"Parameter {name} has shape {actual}, expected {shape}"
                )
        object.__setattr__(
            self, "_index", {token: i + 1 for i, token in enumerate(self.alphabet)}
        )

    @property
    def embed_dim(self) -> int:
        return self.embedding.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.recurrent_weight.shape[0]

    def parameters(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in PARAMETER_NAMES}

    def with_parameters(self, params: dict[str, np.ndarray]) -> "RnnModel":
        return RnnModel(alphabet=self.alphabet, **{n: params[n] for n in PARAMETER_NAMES})

    def parameter_norm(self) -> float:
        """2-norm of all parameters flattened into one vector."""
        return float(
            np.sqrt(sum(float(np.sum(p * p)) for p in self.parameters().values()))
        )

    def is_finite(self) -> bool:
        return all(bool(np.all(np.isfinite(p))) for p in self.parameters().values())

    # ------------------------------------------------------------------------
    # Forward passes
    # ------------------------------------------------------------------------

    def encode(self, word: str) -> np.ndarray:
        """Token indices of BOS followed by ``word``."""
        try:
            return np.array(
                [BOS_INDEX, *(self._index[token] for token in word)], dtype=np.int64
            )
        except KeyError as exc:
            raise InvalidInputError(
                f"Token {exc.args[0]!r} is not in the alphabet",
                details={"word": word, "alphabet": list(self.alphabet)},
            ) from exc

    def forward(self, word: str) -> ForwardResult:
        """
        Read ``word`` one token at a time.

        Each step is a fixed-shape matrix-vector product, so the hidden state
        of a prefix is bitwise identical whichever string it is read from.
        """
        indices = self.encode(word)
        hidden = np.empty((len(indices), self.hidden_dim))
        logits = np.empty((len(indices), 2))
        state = np.zeros(self.hidden_dim)
        for position, index in enumerate(indices):
            state = np.tanh(
                self.recurrent_weight @ state + self.input_weight @ self.embedding[index]
            )
            hidden[position] = state
            logits[position] = self.head_weight @ state + self.head_bias
        return ForwardResult(hidden=hidden, yhat=accept_probability(logits))

    def forward_batch(self, words: list[str]) -> BatchForward:
        """Run a padded batch; positions past a string's end are masked out."""
        encoded = [self.encode(word) for word in words]
        steps = max(len(seq) for seq in encoded)
        indices = np.full((len(words), steps), BOS_INDEX, dtype=np.int64)
        mask = np.zeros((len(words), steps), dtype=bool)
        for row, seq in enumerate(encoded):
            indices[row, : len(seq)] = seq
            mask[row, : len(seq)] = True

        hidden = np.empty((len(words), steps, self.hidden_dim))
        state = np.zeros((len(words), self.hidden_dim))
        inputs = self.embedding[indices] @ self.input_weight.T
        for t in range(steps):
            state = np.tanh(state @ self.recurrent_weight.T + inputs[:, t])
            hidden[:, t] = state
        logits = hidden @ self.head_weight.T + self.head_bias
        return BatchForward(
            indices=indices,
            mask=mask,
            hidden=hidden,
            logits=logits,
            yhat=accept_probability(logits),
        )


@dataclass(frozen=True, eq=False)
class AdamState:
    """Moment estimates and step counter of the AdamW optimizer."""

    step: int
    first: dict[str, np.ndarray]
    second: dict[str, np.ndarray]

    @classmethod
    def zeros(cls, params: dict[str, np.ndarray]) -> "AdamState":
        return cls(
            step=0,
            first={name: np.zeros_like(p) for name, p in params.items()},
            second={name: np.zeros_like(p) for name, p in params.items()},
        )


@dataclass(frozen=True, eq=False)
class Checkpoint:
    """Model parameters saved at the end of an epoch, with their metadata."""

    model: RnnModel
    metadata: "CheckpointMetadata"

    @property
    def epoch(self) -> int:
        return self.metadata.epoch
