"""Name-to-agent lookup for the CLI and harness.

An entry maps a public name to factories per role; solo agents provide one
role, cooperative entries provide both.  Factories get the setup context
early (level, config, seed) so construction can already be specialized,
but heavyweight planning belongs in ``Agent.setup``.
"""

from __future__ import annotations

from typing import Callable

from ..config import Config
from ..levels.model import LevelSpec
from .contract import Agent, Role

AgentFactory = Callable[[LevelSpec, Config, int], Agent]


class UnknownAgent(KeyError):
    pass


_entries: dict[str, dict[Role, AgentFactory]] = {}
_builtin_loaded = False


def _ensure_builtin() -> None:
    # deferred so importing the contract never drags in the planners
    global _builtin_loaded
    if not _builtin_loaded:
        _builtin_loaded = True
        from .builtin import register_builtin
        register_builtin()


def register(name: str, **roles: AgentFactory) -> None:
    """Register factories, e.g. register("x", circle=f) or both roles."""
    mapped: dict[Role, AgentFactory] = {}
    for word, factory in roles.items():
        mapped[Role(word)] = factory
    if not mapped:
        raise ValueError("agent %r registers no roles" % name)
    _entries[name] = mapped


def available(role: Role | None = None) -> list[str]:
    _ensure_builtin()
    if role is None:
        return sorted(_entries)
    return sorted(name for name, roles in _entries.items() if role in roles)


def create(name: str, role: Role, level: LevelSpec, cfg: Config, seed: int) -> Agent:
    _ensure_builtin()
    try:
        roles = _entries[name]
    except KeyError:
        raise UnknownAgent("no agent named %r (have: %s)"
                           % (name, ", ".join(sorted(_entries)))) from None
    try:
        factory = roles[role]
    except KeyError:
        raise UnknownAgent("agent %r cannot play the %s" % (name, role.value)) from None
    return factory(level, cfg, seed)


def provides(name: str, role: Role) -> bool:
    _ensure_builtin()
    return role in _entries.get(name, {})
