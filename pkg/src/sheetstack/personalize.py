"""Per-user preferences: command grammar, config persistence, series filtering.

Commands are keyword-anchored, case-insensitive on keywords, and scoped to
one report type:

  use attributes <a>[, <b>...] for <report>
  ignore attribute <a> for <report>
  set window <n> for <report>
  normalize (on|off) for <report>
  reset preferences for <report>
  show insights for <report>
"""

from __future__ import annotations

import difflib
import json
import re
import threading
from dataclasses import dataclass, replace
from pathlib import Path
from urllib.parse import quote

from .errors import CommandParseError
from .timeseries import NTS, RTS, RANK_SUFFIX, SeriesId, TimeSeries

HELP_TEXT = (
    "Commands:\n"
    "  use attributes <a>[, <b>...] for <report>\n"
    "  ignore attribute <a> for <report>\n"
    "  set window <n> for <report>   (n >= 2)\n"
    "  normalize (on|off) for <report>\n"
    "  reset preferences for <report>\n"
    "  show insights for <report>"
)

_VERBS = ("use", "ignore", "set", "normalize", "reset", "show")
_REPORT = r"(?P<report>[A-Za-z0-9][A-Za-z0-9_.-]*)"

_RE_USE = re.compile(
    rf"^\s*use\s+attributes\s+(?P<attrs>\S.*?)\s+for\s+{_REPORT}\s*$", re.IGNORECASE
)
_RE_IGNORE = re.compile(
    rf"^\s*ignore\s+attribute\s+(?P<attr>\S.*?)\s+for\s+{_REPORT}\s*$", re.IGNORECASE
)
_RE_WINDOW = re.compile(
    rf"^\s*set\s+window\s+(?P<n>\S+)\s+for\s+{_REPORT}\s*$", re.IGNORECASE
)
_RE_NORMALIZE = re.compile(
    rf"^\s*normalize\s+(?P<mode>on|off)\s+for\s+{_REPORT}\s*$", re.IGNORECASE
)
_RE_RESET = re.compile(rf"^\s*reset\s+preferences\s+for\s+{_REPORT}\s*$", re.IGNORECASE)
_RE_SHOW = re.compile(rf"^\s*show\s+insights\s+for\s+{_REPORT}\s*$", re.IGNORECASE)


@dataclass(frozen=True)
class Command:
    verb: str  # use | ignore | window | normalize | reset | show
    report_type: str
    attributes: tuple[str, ...] = ()
    window: int | None = None
    normalize: bool | None = None


@dataclass(frozen=True)
class UserConfig:
    user: str = "default"
    report_type: str = ""
    attribute_allowlist: frozenset[str] | None = None  # None = all attributes
    attribute_denylist: frozenset[str] = frozenset()
    combo_allowlist: frozenset[tuple[str, ...]] | None = None
    window_size: int | None = None  # None = engine default
    normalize: bool = False
    rng_seed: int = 42


def _fail(text: str, message: str) -> CommandParseError:
    first = text.strip().split(" ", 1)[0].lower() if text.strip() else ""
    near = difflib.get_close_matches(first, _VERBS, n=1, cutoff=0.6)
    if near and near[0] != first:
        message += f" (did you mean '{near[0]} ...'?)"
    return CommandParseError(message, help_text=HELP_TEXT)


def parse_command(text: str) -> Command:
    """Parse one command line; anything off-grammar raises CommandParseError."""
    m = _RE_USE.match(text)
    if m:
        attrs = tuple(a.strip() for a in m.group("attrs").split(","))
        if any(not a for a in attrs):
            raise _fail(text, "empty attribute name in list")
        return Command("use", m.group("report"), attributes=attrs)
    m = _RE_IGNORE.match(text)
    if m:
        return Command("ignore", m.group("report"), attributes=(m.group("attr").strip(),))
    m = _RE_WINDOW.match(text)
    if m:
        try:
            n = int(m.group("n"), 10)
        except ValueError:
            raise _fail(text, f"window size {m.group('n')!r} is not an integer")
        if n < 2:
            raise _fail(text, "window size must be at least 2")
        return Command("window", m.group("report"), window=n)
    m = _RE_NORMALIZE.match(text)
    if m:
        return Command(
            "normalize", m.group("report"), normalize=m.group("mode").lower() == "on"
        )
    m = _RE_RESET.match(text)
    if m:
        return Command("reset", m.group("report"))
    m = _RE_SHOW.match(text)
    if m:
        return Command("show", m.group("report"))
    raise _fail(text, f"could not parse command: {text.strip()!r}")


def apply_command(
    config: UserConfig, cmd: Command, known_attributes=None
) -> tuple[UserConfig, list[str]]:
    """Pure config transition; unknown attribute names warn but still apply."""
    warnings: list[str] = []
    if known_attributes is not None and cmd.verb in ("use", "ignore"):
        for a in cmd.attributes:
            if a not in known_attributes:
                warnings.append(f"unknown attribute {a!r} (stored; schemas drift)")
    if cmd.verb == "use":
        new = replace(
            config,
            attribute_allowlist=frozenset(cmd.attributes),
            attribute_denylist=frozenset(),
        )
    elif cmd.verb == "ignore":
        if config.attribute_allowlist is not None:
            new = replace(
                config,
                attribute_allowlist=config.attribute_allowlist - set(cmd.attributes),
            )
        else:
            new = replace(
                config,
                attribute_denylist=config.attribute_denylist | set(cmd.attributes),
            )
    elif cmd.verb == "window":
        new = replace(config, window_size=cmd.window)
    elif cmd.verb == "normalize":
        new = replace(config, normalize=bool(cmd.normalize))
    elif cmd.verb == "reset":
        new = UserConfig(
            user=config.user, report_type=config.report_type, rng_seed=config.rng_seed
        )
    elif cmd.verb == "show":
        new = config
    else:
        raise ValueError(f"unknown verb {cmd.verb!r}")
    return new, warnings


def filter_series(
    population: dict[SeriesId, TimeSeries], config: UserConfig
) -> dict[SeriesId, TimeSeries]:
    """Restrict the population to the config's attributes before selection."""
    allow = config.attribute_allowlist
    deny = config.attribute_denylist
    if allow is None and not deny and config.combo_allowlist is None:
        return dict(population)

    def allowed(name: str) -> bool:
        return (allow is None or name in allow) and name not in deny

    out: dict[SeriesId, TimeSeries] = {}
    for sid, series in population.items():
        if sid.group in (NTS, RTS):
            base = sid.attribute
            if sid.group == RTS and base.endswith(RANK_SUFFIX):
                base = base[: -len(RANK_SUFFIX)]
            if allowed(base):
                out[sid] = series
        else:
            members = series.combo or (sid.attribute,)
            ok = all(allowed(c) for c in members)
            if ok and config.combo_allowlist is not None:
                ok = tuple(members) in config.combo_allowlist
            if ok:
                out[sid] = series
    return out


def allowed_attribute_names(config: UserConfig, names) -> set[str]:
    """Window attribute names that survive the config (novelty filtering)."""
    allow = config.attribute_allowlist
    return {
        n
        for n in names
        if (allow is None or n in allow) and n not in config.attribute_denylist
    }


class ConfigStore:
    """One JSON document per (user, report_type) under <data_root>/_configs/."""

    def __init__(self, data_root):
        self.root = Path(data_root) / "_configs"
        self._lock = threading.Lock()

    def _path(self, report_type: str, user: str) -> Path:
        return self.root / quote(report_type, safe="") / (quote(user, safe="") + ".json")

    def load(self, report_type: str, user: str, default: UserConfig | None = None) -> UserConfig:
        path = self._path(report_type, user)
        if not path.exists():
            if default is not None:
                return replace(default, user=user, report_type=report_type)
            return UserConfig(user=user, report_type=report_type)
        doc = json.loads(path.read_text("utf-8"))
        return UserConfig(
            user=doc["user"],
            report_type=doc["report_type"],
            attribute_allowlist=(
                None
                if doc["attribute_allowlist"] is None
                else frozenset(doc["attribute_allowlist"])
            ),
            attribute_denylist=frozenset(doc["attribute_denylist"]),
            combo_allowlist=(
                None
                if doc["combo_allowlist"] is None
                else frozenset(tuple(c) for c in doc["combo_allowlist"])
            ),
            window_size=doc["window_size"],
            normalize=doc["normalize"],
            rng_seed=doc["rng_seed"],
        )

    def save(self, config: UserConfig) -> None:
        doc = {
            "user": config.user,
            "report_type": config.report_type,
            "attribute_allowlist": (
                None
                if config.attribute_allowlist is None
                else sorted(config.attribute_allowlist)
            ),
            "attribute_denylist": sorted(config.attribute_denylist),
            "combo_allowlist": (
                None
                if config.combo_allowlist is None
                else sorted(list(c) for c in config.combo_allowlist)
            ),
            "window_size": config.window_size,
            "normalize": config.normalize,
            "rng_seed": config.rng_seed,
        }
        path = self._path(config.report_type, config.user)
        with self._lock:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(doc, indent=1), "utf-8")
            tmp.replace(path)

    def users(self, report_type: str) -> list[str]:
        d = self.root / quote(report_type, safe="")
        if not d.is_dir():
            return []
        from urllib.parse import unquote

        return sorted(unquote(p.stem) for p in d.glob("*.json"))
