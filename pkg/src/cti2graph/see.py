"""System entity extraction: the regular-expression battery.

Recognizes names that can show up in audit logs (paths, executables,
registry keys, network endpoints, hashes, ...) inside free text.  Indicators
are re-fanged before matching.  The battery can be replaced with a
``patterns.lex`` file of ``class<TAB>expression`` lines.
"""

from __future__ import annotations

import enum
import ipaddress
import re
from dataclasses import dataclass

from .lexicon import Lexicon


class Kind(str, enum.Enum):
    FILE = "file"
    PROCESS = "process"
    REGISTRY = "registry"
    SOCKET = "socket"


WILDCARD = "*"


@dataclass(frozen=True)
class Entity:
    name: str
    kind: Kind
    span: tuple[int, int] = (0, 0)
    pattern: str = "wildcard"

    @property
    def is_wildcard(self) -> bool:
        return self.name == WILDCARD


_REFANG = [
    (re.compile(r"\bhxxp(s?)", re.I), r"http\1"),
    (re.compile(r"\bfxp\b", re.I), "ftp"),
    (re.compile(r"\[\s*(?:\.|dot)\s*\]|\(\s*(?:\.|dot)\s*\)|\{\s*(?:\.|dot)\s*\}", re.I), "."),
    (re.compile(r"\[\s*:\s*\]"), ":"),
    (re.compile(r"\[://\]"), "://"),
    (re.compile(r"\[\s*(?:@|at)\s*\]|\(\s*(?:@|at)\s*\)", re.I), "@"),
]


def refang(text: str) -> str:
    """Undo the usual indicator defanging (``hxxp``, ``[.]``, ``(dot)``...)."""
    if "[" not in text and "(" not in text and "{" not in text and "xx" not in text.lower():
        return text
    for pat, repl in _REFANG:
        text = pat.sub(repl, text)
    return text


_PATH_CHARS = r"[^\s\\/:*?\"<>|,;]"
_EXEC_EXT = ("exe|dll|bat|ps1|psm1|vbs|vbe|scr|ocx|tlb|pf|sys|jar|js|jse|cmd|cpl|msi|"
             "hta|lnk|wsf|sh|elf|so|dylib|bin|apk|py|pyc|pl|rb|php|jsp|aspx|asp")
_DATA_EXT = ("docx?|docm|xlsx?|xlsm|pptx?|pdf|rtf|txt|log|tmp|dat|ini|cfg|conf|xml|json|"
             "zip|rar|7z|cab|iso|img|gz|tar|db|sqlite|pem|crt|lock|bak|csv|html?|eml|ps")
_TLDS = ("com|net|org|info|biz|ru|cn|io|co|uk|de|fr|jp|kr|in|br|tk|xyz|top|club|online|"
         "site|pw|cc|su|ws|me|tv|us|eu|ir|ua|kz|onion|gov|edu|mil|vn|tw|hk|nl|it|es|pl|"
         "ca|au|ch|se|no|fi|dk|be|at|cz|ro|hu|gr|tr|il|sa|ae|za|mx|ar|cl|id|my|sg|th|ph|"
         "pk|bd|ng|ke|live|space|website|tech|store|app|dev|cloud|host|link|click|win|bid|"
         "loan|work|party|date|review|download|stream|icu|cf|ga|gq|ml")
_HIVE = (r"(?i:\bHKEY(?:_[A-Z]+)+|\bHKEY(?:\\(?:CURRENT|LOCAL|CLASSES|USERS|USER|MACHINE|"
         r"ROOT|CONFIG))+|\bHKLM|\bHKCU|\bHKCR|\bHKU|\bHKCC)")
_REG_TAIL = r"(?:\\[^\s\\\"',;]+(?: (?=[A-Z][a-z]+\\))?)+\\?"

# (class, expression); order breaks ties between equally long matches.
DEFAULT_BATTERY: tuple[tuple[str, str], ...] = (
    ("url", r"\b(?i:https?|ftp|sftp|wss?|file)://[^\s\"'<>\]\[)(]+"),
    ("email", r"\b[\w.+-]+@(?:[A-Za-z0-9-]+\.)+[A-Za-z]{2,}\b"),
    ("registry_value", _HIVE + _REG_TAIL + r"\s+/v\s+[^\s\"',;]+"),
    ("registry_key", _HIVE + _REG_TAIL),
    ("pipe", r"\\\\\.\\pipe\\[\w.\-]+"),
    ("unc_path", r"\\\\[\w.\-]+(?:\\" + _PATH_CHARS + r"+)+"),
    ("windows_path", r"\b[A-Za-z]:\\(?:" + _PATH_CHARS + r"+\\)*" + _PATH_CHARS + r"*"),
    ("env_path", r"(?:%[A-Za-z][\w ()\-]{0,40}%|<[A-Za-z][\w ]{0,40}>)(?:\\"
     + _PATH_CHARS + r"+)*\\?"),
    ("unix_path", r"(?<![\w.~/])(?:~|/(?:etc|tmp|var|usr|bin|sbin|home|root|dev|proc|opt|"
     r"lib|lib64|mnt|sys|run|boot|srv|Library|Users|Applications|System|private))"
     r"(?:/[\w.@+\-]+)+/?"),
    ("unix_path_deep", r"(?<![\w.~/])/(?:[\w.@+\-]+/){2,}[\w.@+\-]*"),
    ("relative_path", r"(?<![\w\\/])(?:[\w.\-]+[\\/])+[\w.\-]*[\w\-]\.(?i:"
     + _EXEC_EXT + "|" + _DATA_EXT + r")(?![\w\-])"),
    ("executable", r"(?<![\w\\/.\-])\w[\w.\-]*\.(?i:" + _EXEC_EXT + r")(?![\w\-])"),
    ("data_file", r"(?<![\w\\/.\-])\w[\w.\-]*\.(?i:" + _DATA_EXT + r")(?![\w\-])"),
    ("ipv4_port", r"(?<![\d.])(?:(?:25[0-5]|2[0-4]\d|1?\d?\d)\.){3}(?:25[0-5]|2[0-4]\d|1?\d?\d)"
     r":\d{1,5}(?!\d)"),
    ("ipv4", r"(?<![\d.])(?:(?:25[0-5]|2[0-4]\d|1?\d?\d)\.){3}(?:25[0-5]|2[0-4]\d|1?\d?\d)"
     r"(?!\.?\d)"),
    ("ipv6", r"(?<![\w:])(?:[0-9A-Fa-f]{1,4}:){7}[0-9A-Fa-f]{1,4}(?![\w:])"),
    ("ipv6_short", r"(?<![\w:])(?:[0-9A-Fa-f]{1,4}:){1,6}:(?:[0-9A-Fa-f]{1,4}:){0,5}"
     r"[0-9A-Fa-f]{1,4}(?![\w:])"),
    ("domain", r"(?<![\w@.\-])(?:[A-Za-z0-9](?:[A-Za-z0-9\-]{0,61}[A-Za-z0-9])?\.)+(?i:"
     + _TLDS + r")(?![\w\-])"),
    ("sha512", r"\b[A-Fa-f0-9]{128}\b"),
    ("sha256", r"\b[A-Fa-f0-9]{64}\b"),
    ("sha1", r"\b[A-Fa-f0-9]{40}\b"),
    ("md5", r"\b[A-Fa-f0-9]{32}\b"),
    ("cve", r"\b(?i:cve)-\d{4}-\d{4,7}\b"),
    ("mutex", r"\b(?:Global|Local|Session\\\d+|BaseNamedObjects)\\[\w.{}\-]+"),
)

# Classes whose matches are network endpoints or registry keys by construction.
SOCKET_CLASSES = frozenset({"url", "ipv4", "ipv4_port", "ipv6", "ipv6_short", "domain", "email"})
REGISTRY_CLASSES = frozenset({"registry_key", "registry_value"})
IP_CLASSES = frozenset({"ipv4", "ipv4_port", "ipv6", "ipv6_short"})

_TRAILING = ".,;:)]}'\"!?"


class Battery:
    """Compiled pattern battery bound to one lexicon."""

    def __init__(self, lexicon: Lexicon):
        battery = list(lexicon.patterns) if lexicon.patterns else list(DEFAULT_BATTERY)
        tokens = sorted(lexicon.nouns, key=len, reverse=True)
        if tokens:
            alt = "|".join(re.escape(t) for t in tokens)
            battery.append(("noun_path", r"(?<![\w\\%<])(?:" + alt + r")\\(?:" + _PATH_CHARS + r"+\\?)*"))
            battery.append(("noun_token", r"(?<![\w\\%<])(?:" + alt + r")(?![\w\\>%])"))
        procs = sorted((p for p in lexicon.words.known_processes if len(p) > 3), key=len, reverse=True)
        if procs:
            alt = "|".join(re.escape(p) for p in procs)
            battery.append(("known_process", r"(?<![\w.\\/\-])(?i:" + alt + r")(?:\.(?i:exe))?(?![\w\-])"))
        self.battery = tuple(battery)
        self.patterns = [(cls, re.compile(expr)) for cls, expr in battery]
        self.noun_tokens = frozenset(lexicon.nouns)
        self.known_processes = lexicon.words.known_processes
        self._token_re = re.compile("|".join(f"(?:{expr})" for _, expr in battery))
        self._plain_word = re.compile(r"[A-Za-z]+\Z")

    def find(self, text: str) -> list[tuple[int, int, str]]:
        """Maximal non-overlapping matches as ``(start, end, class)``, ordered by offset."""
        cands = []
        for order, (cls, pat) in enumerate(self.patterns):
            for m in pat.finditer(text):
                start, end = m.span()
                while end > start and text[end - 1] in _TRAILING:
                    # keep the closing bracket of <TEMP>-style tokens and the '*' of IP:.*
                    if text[end - 1] == "." and text[start:end] in self.noun_tokens:
                        break
                    end -= 1
                if end <= start or not _valid(cls, text[start:end]):
                    continue
                cands.append((end - start, start, order, end, cls))
        cands.sort(key=lambda c: (-c[0], c[1], c[2]))
        taken: list[tuple[int, int, str]] = []
        for _, start, _, end, cls in cands:
            if all(end <= s or start >= e for s, e, _ in taken):
                taken.append((start, end, cls))
        taken.sort()
        return taken

    def is_entity_token(self, surface: str) -> bool:
        """True when a whole token is one system-entity name."""
        if self._plain_word.match(surface):
            return surface in self.noun_tokens or (
                surface.lower() in self.known_processes and len(surface) > 3)
        if surface in self.noun_tokens:
            return True
        text = refang(surface)
        if not self._token_re.fullmatch(text):
            return False
        found = self.find(text)
        return len(found) == 1 and found[0][0] == 0 and found[0][1] == len(text)


def _valid(cls: str, text: str) -> bool:
    if cls in ("ipv6", "ipv6_short"):
        try:
            ipaddress.IPv6Address(text)
        except ValueError:
            return False
    return True


def base_kind(cls: str, name: str) -> Kind:
    if cls in REGISTRY_CLASSES:
        return Kind.REGISTRY
    if cls in SOCKET_CLASSES:
        return Kind.SOCKET
    if cls == "noun_token" and name.startswith("IP:"):
        return Kind.SOCKET
    if cls == "known_process":
        return Kind.PROCESS
    return Kind.FILE


_BATTERIES: dict[int, tuple[Lexicon, Battery]] = {}


def battery_for(lexicon: Lexicon) -> Battery:
    hit = _BATTERIES.get(id(lexicon))
    if hit is None or hit[0] is not lexicon:
        hit = (lexicon, Battery(lexicon))
        _BATTERIES[id(lexicon)] = hit
    return hit[1]


def see_extract(phrase: str, lexicon: Lexicon) -> list[Entity]:
    """All system entities in ``phrase``, typed by pattern class.

    Spans are offsets into the re-fanged phrase.
    """
    text = refang(phrase)
    return [Entity(text[s:e], base_kind(cls, text[s:e]), (s, e), cls)
            for s, e, cls in battery_for(lexicon).find(text)]
