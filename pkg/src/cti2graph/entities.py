"""Turn frame phrases into typed system entities; everything else becomes '*'."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .frames import Frame, Role
from .lexicon import Lexicon
from .see import (
    REGISTRY_CLASSES, SOCKET_CLASSES, WILDCARD, Entity, Kind, see_extract,
)

__all__ = ["Entity", "Kind", "see_extract", "prune_to_entity", "type_entity",
           "frame_entities", "Triple", "resolve_frames"]

_HIVE = re.compile(r"^(?:HKEY[_\\]|HKLM\b|HKCU\b|HKCR\b|HKU\b|HKCC\b)", re.I)
_IP = re.compile(r"^(?:\d{1,3}\.){3}\d{1,3}(?::\d+)?$|^[0-9A-Fa-f:]+:[0-9A-Fa-f:]*$")
_URLISH = re.compile(r"^[a-z][a-z0-9+.\-]*://", re.I)

PROCESS_ACTIONS = frozenset({"fork", "exec"})
SOCKET_ACTIONS = frozenset({"connect", "send", "receive"})
QUALIFY_ACTIONS = frozenset({"write", "read"})
REGISTRY_ACTIONS = frozenset({"write", "unlink", "read"})


def _stem(name: str) -> str:
    base = re.split(r"[\\/]", name)[-1].lower()
    return base[:-4] if base.endswith(".exe") else base


def wildcard_kind(slot: str, action: str) -> Kind:
    if slot == "agent":
        return Kind.PROCESS
    if action in PROCESS_ACTIONS:
        return Kind.PROCESS
    if action in SOCKET_ACTIONS:
        return Kind.SOCKET
    return Kind.FILE


def type_entity(name: str, slot: str, action: str, lexicon: Lexicon,
                agents: Iterable[str] = (), pattern: str = "") -> Kind:
    """Registry, socket, process or file for a matched name in a frame slot."""
    if name == WILDCARD:
        return wildcard_kind(slot, action)
    if pattern in REGISTRY_CLASSES or _HIVE.match(name):
        return Kind.REGISTRY
    if (pattern in SOCKET_CLASSES or name.startswith("IP:") or _IP.match(name)
            or _URLISH.match(name)):
        return Kind.SOCKET
    agents = {a.casefold() for a in agents}
    if (slot == "agent" or name.casefold() in agents
            or _stem(name) in lexicon.words.known_processes
            or (slot == "patient" and action in PROCESS_ACTIONS)):
        return Kind.PROCESS
    return Kind.FILE


def _typed(e: Entity, slot: str, action: str, lexicon: Lexicon, agents) -> Entity:
    return Entity(e.name, type_entity(e.name, slot, action, lexicon, agents, e.pattern),
                  e.span, e.pattern)


def prune_to_entity(phrase: str, slot: str, frame: Frame, lexicon: Lexicon,
                    agents: Iterable[str] = ()) -> Entity:
    """First system entity in the slot phrase, else a wildcard typed by slot role.

    A patient with a location on a write/read frame is path-qualified
    ('a copy of itself' in 'TEMP' -> 'TEMP\\*').
    """
    if slot == "patient":
        return frame_patients(frame, lexicon, agents)[0]
    found = see_extract(phrase, lexicon)
    if found:
        return _typed(found[0], slot, frame.action, lexicon, agents)
    return Entity(WILDCARD, wildcard_kind(slot, frame.action))


def _location_entities(frame: Frame, lexicon: Lexicon) -> list[Entity]:
    out = []
    for phrase in frame.extras_of(Role.LOCATION):
        found = [e for e in see_extract(phrase, lexicon)
                 if e.kind is Kind.FILE and e.pattern not in ("executable", "known_process")]
        if found:
            out.append(found[0])
    return out


def frame_patients(frame: Frame, lexicon: Lexicon, agents: Iterable[str] = ()) -> list[Entity]:
    """Patient entities of a frame: one per location when path-qualified."""
    action = frame.action
    if action in REGISTRY_ACTIONS:
        for role, phrase in frame.extras:
            if role is Role.TEMPORAL:
                continue
            keys = [e for e in see_extract(phrase, lexicon) if e.pattern in REGISTRY_CLASSES]
            if keys:
                return [Entity(keys[0].name, Kind.REGISTRY, keys[0].span, keys[0].pattern)]
    found = see_extract(frame.patient, lexicon) if frame.patient != WILDCARD else []
    if action in QUALIFY_ACTIONS:
        locs = _location_entities(frame, lexicon)
        bare = found[0].name if found and not re.search(r"[\\/]", found[0].name) else None
        if locs and (not found or bare):
            leaf = bare or WILDCARD
            return [Entity(f"{loc.name.rstrip(chr(92))}\\{leaf}", Kind.FILE, loc.span, "qualified")
                    for loc in locs]
    if found:
        return [_typed(found[0], "patient", action, lexicon, agents)]
    for role in (Role.TARGET, Role.SOURCE):
        for phrase in frame.extras_of(role):
            hits = see_extract(phrase, lexicon)
            if hits:
                return [_typed(hits[0], "patient", action, lexicon, agents)]
    return [Entity(WILDCARD, wildcard_kind("patient", action))]


def frame_entities(frame: Frame, lexicon: Lexicon,
                   agents: Iterable[str] = ()) -> tuple[Entity, list[Entity]]:
    agent = prune_to_entity(frame.agent, "agent", frame, lexicon, agents)
    return agent, frame_patients(frame, lexicon, agents)


@dataclass(frozen=True)
class Triple:
    agent: Entity
    action: str
    patient: Entity
    sentence: int
    conditional: bool = False


def document_agents(frames: Iterable[Frame], lexicon: Lexicon) -> set[str]:
    out = set()
    for f in frames:
        hits = see_extract(f.agent, lexicon)
        if hits:
            out.add(hits[0].name)
    return out


def resolve_frames(frames: list[Frame], lexicon: Lexicon) -> list[Triple]:
    """Entity-resolve frames into node-edge-node triples (one per patient location)."""
    agents = document_agents(frames, lexicon)
    out = []
    for f in frames:
        agent, patients = frame_entities(f, lexicon, agents)
        for p in patients:
            out.append(Triple(agent, f.action, p, f.sentence, f.negated and f.conditional))
    return out
