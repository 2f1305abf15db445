"""
Recognizer operations.

This module provides:
- init_model: scaled-uniform initialization
- forward / decisions: hidden states and per-prefix accept decisions
- batch_loss / loss_and_gradients: summed per-position cross-entropy with full BPTT
- adamw_step: one AdamW update with decoupled weight decay
- saturation_level / kappa_bound: how close states are to ±1 patterns, and
  the similarity tolerance that provably keeps distinct patterns apart
"""

import logging
import math

import numpy as np

from core.exceptions import InvalidInputError, TrainingDivergedError
from models import AdamState, BatchForward, ForwardResult, Recognizer, RnnModel
from schemas import OptimizerConfig

logger = logging.getLogger(__name__)


def init_model(
    embed_dim: int,
    hidden_dim: int,
    rng: np.random.Generator,
    alphabet: tuple[str, ...] = ("a", "b"),
) -> RnnModel:
    """
    Create a recognizer with uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights.

    fan_in is the number of columns of each matrix (e for E and V, d for U
    and the head); the head bias uses d.

    Raises:
        InvalidInputError: If a dimension is below 1
    """
    if embed_dim < 1 or hidden_dim < 1:
        raise InvalidInputError(
            "Embedding and hidden dimensions must be at least 1",
            details={"embed_dim": embed_dim, "hidden_dim": hidden_dim},
        )

    def uniform(shape: tuple[int, ...], fan_in: int) -> np.ndarray:
        bound = 1.0 / math.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=shape)

    return RnnModel(
        alphabet=alphabet,
        embedding=uniform((len(alphabet) + 1, embed_dim), embed_dim),
        recurrent_weight=uniform((hidden_dim, hidden_dim), hidden_dim),
        input_weight=uniform((hidden_dim, embed_dim), embed_dim),
        head_weight=uniform((2, hidden_dim), hidden_dim),
        head_bias=uniform((2,), hidden_dim),
    )


def forward(model: Recognizer, word: str) -> ForwardResult:
    """Hidden states (n+1 rows) and acceptance probabilities of ``word``."""
    return model.forward(word)


def threshold(yhat: np.ndarray) -> tuple[bool, ...]:
    """Accept exactly where the probability is above 0.5; ties reject."""
    return tuple(bool(p > 0.5) for p in yhat)


def decisions(model: Recognizer, word: str) -> tuple[bool, ...]:
    """Recognition decision for every prefix of ``word``."""
    return threshold(model.forward(word).yhat)


# ============================================================================
# Training math
# ============================================================================


def _cross_entropy(batch: BatchForward, labels: list[tuple[bool, ...]]):
    """Targets, position weights, shifted logits, log-normalizers and the loss."""
    size, steps = batch.indices.shape
    targets = np.zeros((size, steps), dtype=np.int64)
    for row, y in enumerate(labels):
        if len(y) != int(batch.mask[row].sum()):
            raise InvalidInputError(
                "Every string needs one label per prefix", details={"row": row}
            )
        targets[row, : len(y)] = y
    weights = batch.mask.astype(np.float64) / size

    shifted = batch.logits - batch.logits.max(axis=-1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=-1))
    picked = np.take_along_axis(shifted, targets[..., None], axis=-1)[..., 0]
    loss = float(np.sum(weights * (log_norm - picked)))
    return targets, weights, shifted, log_norm, loss


def batch_loss(model: RnnModel, words: list[str], labels: list[tuple[bool, ...]]) -> float:
    """Training loss of a batch without gradients."""
    return _cross_entropy(model.forward_batch(words), labels)[-1]


def loss_and_gradients(
    model: RnnModel, words: list[str], labels: list[tuple[bool, ...]]
) -> tuple[float, dict[str, np.ndarray]]:
    """
    Cross-entropy summed over prefixes, averaged over the batch, with gradients.

    Gradients are exact backpropagation through time over the whole sequence.

    Args:
        model: Recognizer to differentiate
        words: Batch of strings (any lengths; shorter ones are masked)
        labels: Per-prefix targets, len(word) + 1 each

    Returns:
        (loss, gradients keyed like RnnModel.parameters())
    """
    batch = model.forward_batch(words)
    size, steps = batch.indices.shape
    targets, weights, shifted, log_norm, loss = _cross_entropy(batch, labels)

    probs = np.exp(shifted - log_norm[..., None])
    dlogits = probs
    np.put_along_axis(
        dlogits, targets[..., None], np.take_along_axis(probs, targets[..., None], -1) - 1.0, -1
    )
    dlogits *= weights[..., None]

    hidden = batch.hidden
    grads = {
        "head_weight": np.einsum("btk,btd->kd", dlogits, hidden),
        "head_bias": dlogits.sum(axis=(0, 1)),
        "recurrent_weight": np.zeros_like(model.recurrent_weight),
        "input_weight": np.zeros_like(model.input_weight),
        "embedding": np.zeros_like(model.embedding),
    }
    direct = dlogits @ model.head_weight
    inputs = model.embedding[batch.indices]
    carry = np.zeros((size, model.hidden_dim))
    for t in range(steps - 1, -1, -1):
        dpre = (direct[:, t] + carry) * (1.0 - hidden[:, t] ** 2)
        previous = hidden[:, t - 1] if t > 0 else np.zeros_like(carry)
        grads["recurrent_weight"] += dpre.T @ previous
        grads["input_weight"] += dpre.T @ inputs[:, t]
        np.add.at(grads["embedding"], batch.indices[:, t], dpre @ model.input_weight)
        carry = dpre @ model.recurrent_weight
    return loss, grads


def adamw_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    hyper: OptimizerConfig,
) -> tuple[dict[str, np.ndarray], AdamState]:
    """
    One AdamW update.

    Weight decay is decoupled: parameters are first scaled by
    (1 - lr * weight_decay), then moved by the bias-corrected Adam step.
    Inputs are not modified.

    Raises:
        TrainingDivergedError: If a gradient has a non-finite entry
    """
    for name, grad in grads.items():
        if not np.all(np.isfinite(grad)):
            raise TrainingDivergedError(
                f"Non-finite gradient for {name}", details={"parameter": name}
            )

    step = state.step + 1
    first_correction = 1.0 - hyper.beta1**step
    second_correction = 1.0 - hyper.beta2**step
    new_params, first, second = {}, {}, {}
    for name, value in params.items():
        grad = grads[name]
        first[name] = hyper.beta1 * state.first[name] + (1.0 - hyper.beta1) * grad
        second[name] = hyper.beta2 * state.second[name] + (1.0 - hyper.beta2) * grad**2
        update = (first[name] / first_correction) / (
            np.sqrt(second[name] / second_correction) + hyper.eps
        )
        new_params[name] = value * (1.0 - hyper.lr * hyper.weight_decay) - hyper.lr * update
    return new_params, AdamState(step=step, first=first, second=second)


# ============================================================================
# Saturation
# ============================================================================


def sign_pattern(hidden: np.ndarray) -> np.ndarray:
    """Unit-norm saturated version of a state: sign(h)/sqrt(d), sign(0) = +1."""
    return np.where(hidden >= 0, 1.0, -1.0) / math.sqrt(hidden.shape[-1])


def state_saturation(hidden: np.ndarray) -> float:
    """
    Largest distance between a normalized state and its sign pattern.

    Args:
        hidden: Matrix of hidden states, one per row

    Returns:
        max ‖h/‖h‖ − sign(h)/√d‖ over rows with non-zero norm
    """
    states = np.atleast_2d(hidden)
    norms = np.linalg.norm(states, axis=1)
    degenerate = norms == 0
    if np.any(degenerate):
        logger.warning(f"Skipping {int(degenerate.sum())} zero hidden vectors")
    states = states[~degenerate]
    if len(states) == 0:
        raise InvalidInputError("No non-zero hidden state to measure")
    normalized = states / norms[~degenerate, None]
    return float(np.max(np.linalg.norm(normalized - sign_pattern(states), axis=1)))


def saturation_level(model: Recognizer, strings: list[str]) -> float:
    """ε such that the recognizer is ε-saturated on every state it visits."""
    if not strings:
        raise InvalidInputError("saturation_level needs at least one string")
    hidden = np.concatenate([model.forward(word).hidden for word in strings])
    return state_saturation(hidden)


def kappa_bound(dim: int, epsilon: float) -> float | None:
    """
    Largest tolerance keeping distinct sign patterns apart.

    States within ε of their patterns and with cosine ≥ 1 − κ share a pattern
    whenever κ < 2 (1/√d − ε)². Computed as 2 (1 − ε√d)² / d.

    Returns:
        The bound, or None when ε ≥ 1/√d leaves no feasible tolerance
    """
    if dim < 1 or epsilon < 0:
        raise InvalidInputError(
            "kappa_bound needs dim >= 1 and epsilon >= 0",
            details={"dim": dim, "epsilon": epsilon},
        )
    scaled = epsilon * math.sqrt(dim)
    if scaled >= 1.0 or math.isclose(scaled, 1.0):
        return None
    return 2.0 * (1.0 - scaled) ** 2 / dim
