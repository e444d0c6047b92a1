import os
import tempfile
from concurrent.futures import ThreadPoolExecutor


def max_workers():
    """Worker cap from ``ARCTOMO_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("ARCTOMO_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def ordered_map(func, items):
    """Map ``func`` over ``items`` on a thread pool, results in input order."""
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def atomic_write_text(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_float(x):
    """Shortest decimal string that round-trips to the same double."""
    return repr(float(x))
