"""Plain-text table format and config loading for the CLI harness.

Tables are CSV with a leading block of '# ' metadata lines (config echo,
seed, code version). Reading keeps every line verbatim so that
parse -> re-emit reproduces the file byte for byte; floats are written with
repr(), which round-trips float64 exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Table:
    header: list[str]
    rows: list[list[str]] = field(default_factory=list)
    meta: list[str] = field(default_factory=list)

    def append(self, *cells) -> None:
        self.rows.append([fmt_cell(c) for c in cells])

    def column(self, name: str) -> list[str]:
        i = self.header.index(name)
        return [r[i] for r in self.rows]


def fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "item") and not isinstance(value, str):
        return fmt_cell(value.item())
    return str(value)


def _check(cell: str) -> str:
    if "," in cell or "\n" in cell:
        raise ValueError(f"table cells may not contain commas or newlines: {cell!r}")
    return cell


def write_table(path, table: Table) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for m in table.meta:
            fh.write(f"# {m}\n")
        fh.write(",".join(_check(h) for h in table.header) + "\n")
        for row in table.rows:
            fh.write(",".join(_check(c) for c in row) + "\n")


def read_table(path) -> Table:
    meta: list[str] = []
    header: list[str] | None = None
    rows: list[list[str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if header is None and line.startswith("# "):
                meta.append(line[2:])
            elif header is None:
                header = line.split(",")
            else:
                rows.append(line.split(","))
    if header is None:
        raise ValueError(f"{path}: no header row found")
    return Table(header=header, rows=rows, meta=meta)


def standard_meta(command: str, config: dict, seed=None) -> list[str]:
    from . import __version__

    meta = [f"pdakit={__version__}", f"command={command}",
            "config=" + json.dumps(config, sort_keys=True, default=str)]
    if seed is not None:
        meta.append(f"seed={seed}")
    return meta


def load_config(path) -> dict:
    """Read a JSON or TOML config file into a dict."""
    text = open(path, "rb").read()
    if str(path).endswith(".toml"):
        try:
            import tomllib as toml
        except ImportError:
            try:
                import tomli as toml
            except ImportError:
                raise RuntimeError(
                    "TOML configs need Python >= 3.11 or the tomli package; "
                    "use JSON otherwise"
                ) from None
        return toml.loads(text.decode("utf-8"))
    return json.loads(text.decode("utf-8"))
