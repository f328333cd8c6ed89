import os
from typing import Iterable, List

import fsspec


def exists(url, **kwargs) -> bool:
    """Check if a file exists on a (possibly remote) filesystem."""
    fs, path = fsspec.core.url_to_fs(url, **kwargs)
    return fs.exists(path)


def mkdirs(path):
    """Create a directory and any necessary parent directories."""
    fs, path = fsspec.core.url_to_fs(path)
    fs.makedirs(path, exist_ok=True)


def join(base: str, name: str) -> str:
    # os.path.join is fine for urls as long as the base doesn't end in a protocol separator
    return os.path.join(base, name)


def prepare_output_dir(out_dir: str, file_names: Iterable[str], *, force: bool) -> List[str]:
    """
    Creates ``out_dir`` if needed and returns the full paths of ``file_names`` inside it.

    Raises FileExistsError if any of the files already exists and ``force`` is False, before anything is written.
    """
    mkdirs(out_dir)
    paths = [join(out_dir, name) for name in file_names]
    if not force:
        clobbered = [p for p in paths if exists(p)]
        if clobbered:
            raise FileExistsError(f"Refusing to overwrite {', '.join(clobbered)} (pass --force to overwrite)")
    return paths
