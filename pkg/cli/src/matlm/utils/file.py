from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable

from matlm.exceptions import DataFileError


def read_text_lines(path: Path) -> list[str]:
    """
    UTF-8 lines without terminators; Unix and Windows line endings both work.

    Only LF ends a line, so form feeds and other separators stay inside it.
    A leading byte-order mark is dropped.
    """
    try:
        text = Path(path).read_text(encoding="utf-8-sig")
    except FileNotFoundError:
        raise DataFileError(path, "file not found")
    except UnicodeDecodeError as exc:
        raise DataFileError(path, f"not valid UTF-8 ({exc.reason})")
    except OSError as exc:
        raise DataFileError(path, f"cannot read file: {exc.strerror or exc}")
    if not text:
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return [line.removesuffix("\r") for line in lines]


def write_text_lines(lines: Iterable[str], path: Path) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for line in lines:
            handle.write(line)
            handle.write("\n")
    return path


def save_json_report(report: dict[str, Any], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    return path
