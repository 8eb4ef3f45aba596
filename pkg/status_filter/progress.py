from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn


class ProgressBar:
    """Fold progress on stderr; does nothing when stderr is not a terminal."""

    def __init__(self, total: int, prefix: str = "", width: int = 30, enabled: bool | None = None):
        self.total = max(1, int(total))
        self.prefix = prefix
        self.width = max(5, int(width))
        self.current = 0
        self._stopped = False

        console = Console(stderr=True)
        self._active = console.is_terminal if enabled is None else enabled
        if not self._active:
            return

        self._progress = Progress(
            SpinnerColumn(spinner_name="line"),
            TextColumn("{task.description}"),
            BarColumn(bar_width=self.width),
            TextColumn("{task.completed}/{task.total}"),
            TimeElapsedColumn(),
            console=console,
            transient=True,
        )
        self._task_id = self._progress.add_task(self.prefix, total=self.total)
        self._progress.start()

    def advance(self, n: int = 1) -> None:
        self.update(self.current + n)

    def update(self, current: int) -> None:
        self.current = max(0, min(int(current), self.total))
        if not self._active or self._stopped:
            return
        self._progress.update(self._task_id, completed=self.current)
        if self.current >= self.total:
            self.close()

    def close(self) -> None:
        if self._active and not self._stopped:
            self._progress.stop()
            self._stopped = True

    def __enter__(self) -> "ProgressBar":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()