from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

import structlog
from rich.progress import MofNCompleteColumn, Progress, SpinnerColumn

logger = structlog.get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def default_progress() -> Progress:
    return Progress(
        SpinnerColumn(),
        *Progress.get_default_columns(),
        MofNCompleteColumn(),
        transient=True,
    )


def parallel_map(
    func: Callable[[T], R],
    items: Sequence[T],
    threads: int = 1,
    progress: Progress | None = None,
    name: str = "Processing...",
) -> list[R]:
    """Map `func` over `items` on up to `threads` workers, results in input order.

    Exceptions propagate after being logged; a failed item never yields a partial list.
    """
    task = progress.add_task(name, total=len(items)) if progress is not None else None

    def run(item: T) -> R:
        try:
            return func(item)
        except Exception:
            logger.exception("Error occurred during processing", task=name)
            raise
        finally:
            if progress is not None and task is not None:
                progress.update(task, advance=1)

    if threads <= 1 or len(items) <= 1:
        return [run(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, items))


class OperationCounter:
    """Tallies elementary steps of a stage; complexity tests read it."""

    def __init__(self) -> None:
        self.ops = 0

    def add(self, n: int = 1) -> None:
        self.ops += int(n)
