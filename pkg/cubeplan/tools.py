import json
import pathlib
from typing import Any, Iterable, List


def safe_path_in(root: pathlib.Path, name: str) -> pathlib.Path:
    p = (root / name).resolve()
    if root.resolve() not in p.parents and root.resolve() != p:
        raise ValueError("Attempt to write outside the output directory")
    return p


def write_file(path: pathlib.Path, content: str) -> pathlib.Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(content)
    return path


def read_json(path: str) -> Any:
    p = pathlib.Path(path)
    if not p.is_file():
        raise ValueError(f"{path}: no such file")
    with open(p, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}: invalid JSON: {e}") from e


def write_frames(directory: str, frames: Iterable[str], extension: str, digits: int = 4) -> List[pathlib.Path]:
    """Writes frames as 0000.<ext>, 0001.<ext>, ... inside directory."""
    root = pathlib.Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    frames = list(frames)
    width = max(digits, len(str(len(frames) - 1)))
    written = []
    for k, frame in enumerate(frames):
        written.append(write_file(safe_path_in(root, f"{k:0{width}d}.{extension}"), frame))
    return written
