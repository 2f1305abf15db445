"""
Run identifier tracking.

Every experiment job (one language, seed, kappa, epoch and data count) gets a
run id that is attached to all log records emitted while the job executes.
"""

import uuid
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar

NO_RUN_ID = "no-run-id"

_run_id: ContextVar[str] = ContextVar("run_id", default=NO_RUN_ID)


def get_run_id() -> str:
    """Return the run id of the current context."""
    return _run_id.get()


@contextmanager
def run_context(run_id: str | None = None) -> Iterator[str]:
    """
    Bind a run id for the duration of a block.

    Args:
        run_id: Identifier to bind; a random one is generated when omitted

    Yields:
        The bound run id
    """
    value = run_id or uuid.uuid4().hex[:12]
    token = _run_id.set(value)
    try:
        yield value
    finally:
        _run_id.reset(token)
