"""Drives agents through the tick protocol.

The driver owns message routing (one-tick latency, bounded payloads) and
the decision budget.  Budgets are always measured; whether a late or
crashed agent is actually overruled only matters in real-time sessions,
so enforcement is opt-in and accelerated batch runs stay deterministic.
A crashed agent is retired for the rest of the run: every later tick it
plays NoAction.
"""

from __future__ import annotations

import queue
import threading
import time
import traceback

from ..world.types import Action, CIRCLE_ACTIONS, RECTANGLE_ACTIONS
from .contract import (
    Agent,
    AgentEvent,
    MAX_MESSAGE_BYTES,
    Message,
    Role,
    SensorSnapshot,
    SetupInfo,
    TickResult,
)

DEFAULT_BUDGET_MS = 20.0
SETUP_BUDGET_MS = 10_000.0


class _Worker:
    """Single persistent thread running one agent's callbacks.

    Used only when enforcement is on: the driver waits up to the budget for
    an answer and walks away if it is late; the stale answer is discarded
    when it finally lands.
    """

    def __init__(self, name: str):
        self._in: queue.Queue = queue.Queue()
        self._out: queue.Queue = queue.Queue()
        self._gen = 0
        self._thread = threading.Thread(target=self._loop, name=name, daemon=True)
        self._thread.start()

    def _loop(self):
        while True:
            gen, fn = self._in.get()
            if fn is None:
                return
            try:
                result = (gen, True, fn())
            except Exception:
                result = (gen, False, traceback.format_exc(limit=4))
            self._out.put(result)

    def call(self, fn, timeout_s: float):
        """Returns (ok, value, timed_out)."""
        self._gen += 1
        gen = self._gen
        self._in.put((gen, fn))
        deadline = time.perf_counter() + timeout_s
        while True:
            remain = deadline - time.perf_counter()
            if remain <= 0:
                return False, None, True
            try:
                rgen, ok, value = self._out.get(timeout=remain)
            except queue.Empty:
                return False, None, True
            if rgen != gen:
                continue  # stale late answer from an earlier overrun
            return ok, value, False

    def stop(self):
        self._in.put((0, None))


class AgentHandle:
    def __init__(self, role: Role, agent: Agent, budget_ms: float, enforce: bool):
        self.role = role
        self.agent = agent
        self.budget_s = budget_ms / 1000.0
        self.enforce = enforce
        self.timeouts = 0
        self.dead = False
        self.worker = _Worker("agent-%s" % role.value) if enforce else None

    def _guard(self, tick: int, fn, events: list[AgentEvent], budget_s: float | None = None):
        """Run one callback under the budget policy; returns (ok, value)."""
        if self.dead:
            return False, None
        budget = self.budget_s if budget_s is None else budget_s
        if self.worker is not None:
            ok, value, late = self.worker.call(fn, budget)
            if late:
                self.timeouts += 1
                events.append(AgentEvent(tick, self.role, "timeout",
                                         "budget %.0fms exceeded" % (budget * 1e3)))
                return False, None
            if not ok:
                self.dead = True
                events.append(AgentEvent(tick, self.role, "panic", str(value)))
                return False, None
            return True, value
        t0 = time.perf_counter()
        try:
            value = fn()
        except Exception:
            self.dead = True
            events.append(AgentEvent(tick, self.role, "panic",
                                     traceback.format_exc(limit=4)))
            return False, None
        if time.perf_counter() - t0 > budget:
            self.timeouts += 1
            events.append(AgentEvent(tick, self.role, "timeout",
                                     "budget %.0fms exceeded" % (budget * 1e3)))
        return True, value

    def close(self):
        if self.worker is not None:
            self.worker.stop()


class TickDriver:
    """Runs the per-tick agent protocol for whichever roles have agents.

    Roles without an agent (human players, absent characters) simply get
    their actions from the caller via ``tick(external=...)``.
    """

    def __init__(self, budget_ms: float = DEFAULT_BUDGET_MS, enforce_budget: bool = False):
        self.budget_ms = budget_ms
        self.enforce = enforce_budget
        self.handles: dict[Role, AgentHandle] = {}
        self._pending: dict[Role, list[Message]] = {Role.Circle: [], Role.Rectangle: []}
        self.events: list[AgentEvent] = []

    def add_agent(self, role: Role, agent: Agent) -> None:
        if role in self.handles:
            raise ValueError("role %s already has an agent" % role.value)
        self.handles[role] = AgentHandle(role, agent, self.budget_ms, self.enforce)

    def setup(self, infos: dict[Role, SetupInfo]) -> None:
        for role, handle in self.handles.items():
            info = infos[role]
            handle._guard(-1, lambda h=handle, i=info: h.agent.setup(i), self.events,
                          budget_s=SETUP_BUDGET_MS / 1000.0)

    def tick(self, snapshot: SensorSnapshot,
             external: dict[Role, Action | None] | None = None) -> TickResult:
        events: list[AgentEvent] = []
        actions: dict[Role, Action | None] = {Role.Circle: None, Role.Rectangle: None}
        if external:
            actions.update(external)

        # deliver last tick's mail first so replies can react next tick
        inboxes = self._pending
        self._pending = {Role.Circle: [], Role.Rectangle: []}

        for role, handle in self.handles.items():
            mail = inboxes[role]
            if mail:
                handle._guard(snapshot.tick,
                              lambda h=handle, m=mail: h.agent.handle_messages(m), events)
            handle._guard(snapshot.tick,
                          lambda h=handle: h.agent.sensors_update(snapshot), events)
            handle._guard(snapshot.tick, lambda h=handle: h.agent.update(), events)
            ok, action = handle._guard(snapshot.tick,
                                       lambda h=handle: h.agent.get_action(), events)
            if not ok:
                action = None
            action = self._vet_action(role, action, snapshot.tick, events)
            actions[role] = action

        sent: list[Message] = []
        for role, handle in self.handles.items():
            if handle.dead:
                continue
            for payload in handle.agent.drain_outbox():
                if len(payload) > MAX_MESSAGE_BYTES:
                    events.append(AgentEvent(snapshot.tick, role, "oversize_message",
                                             "%d bytes dropped" % len(payload)))
                    continue
                msg = Message(sender=role, payload=payload)
                self._pending[role.partner].append(msg)
                sent.append(msg)

        self.events.extend(events)
        return TickResult(circle_action=actions[Role.Circle],
                          rect_action=actions[Role.Rectangle],
                          sent=sent, events=events)

    def inject(self, message: Message) -> None:
        """Queue a message for next tick as if the sender's agent sent it."""
        self._pending[message.sender.partner].append(message)

    @staticmethod
    def _vet_action(role: Role, action: Action | None, tick: int,
                    events: list[AgentEvent]) -> Action | None:
        if action is None:
            return None
        legal = CIRCLE_ACTIONS if role is Role.Circle else RECTANGLE_ACTIONS
        if not isinstance(action, Action) or action not in legal:
            events.append(AgentEvent(tick, role, "bad_action", repr(action)))
            return None
        return action

    @property
    def timeouts(self) -> dict[Role, int]:
        return {role: h.timeouts for role, h in self.handles.items()}

    def close(self) -> None:
        for handle in self.handles.values():
            handle.close()
