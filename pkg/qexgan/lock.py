import os
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

from qexgan.errors import WorkdirLockedError
from qexgan.locations import LOCK_FILE


@contextmanager
def workdir_lock(workdir: Path) -> Iterator[Path]:
    """Hold the advisory lock file of `workdir` for the duration of a command."""
    workdir.mkdir(parents=True, exist_ok=True)
    lock_path = workdir / LOCK_FILE
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError as e:
        raise WorkdirLockedError(lock_path) from e
    try:
        os.write(fd, str(os.getpid()).encode())
    finally:
        os.close(fd)
    try:
        yield lock_path
    finally:
        lock_path.unlink(missing_ok=True)
