"""In-process publish/subscribe for sweep and engine progress.

Handlers run synchronously, in priority order and then in subscription order,
so every subscriber sees events in the order the run produced them. The bus
also keeps an ordered record of what was published, with or without listeners.
"""
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Callable, Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)

Handler = Callable[[str, Any], None]
WILDCARD = "*"


class Priority(IntEnum):
    HIGH = 0
    NORMAL = 1
    LOW = 2


@dataclass(order=True)
class Subscription:
    priority: Priority
    order: int
    handler: Handler = field(compare=False)
    owner: str = field(default="", compare=False)

    @property
    def name(self) -> str:
        return self.owner or getattr(self.handler, "__name__", repr(self.handler))


class EventBus:
    """
    Synchronous event bus.

    Usage:
        bus = EventBus()
        bus.subscribe(CLASS_FOUND, on_class)
        iterated_decomposition(family, bus=bus)
        bus.events(CLASS_FOUND)  # payloads, in publication order

    A failing handler is logged and skipped; with strict=True the failure
    propagates to the publisher instead.
    """

    def __init__(self, keep: int = 1000, strict: bool = False) -> None:
        self._subscribers: Dict[str, List[Subscription]] = {}
        self._record: List[Tuple[str, Any]] = []
        self._keep = keep
        self._strict = strict
        self._order = 0
        self.failures = 0

    def subscribe(
        self,
        event: str,
        handler: Handler,
        priority: Priority = Priority.NORMAL,
        owner: str = "",
    ) -> Subscription:
        sub = Subscription(priority=priority, order=self._order, handler=handler, owner=owner)
        self._order += 1
        subs = self._subscribers.setdefault(event, [])
        subs.append(sub)
        subs.sort()
        logger.debug(f"[EventBus] {sub.name} subscribed to '{event}' (priority={priority.name})")
        return sub

    def publish(self, event: str, data: Any = None) -> int:
        """Deliver to the handlers of `event` and the wildcard; returns how many ran."""
        handlers = list(self._subscribers.get(event, []))
        if event != WILDCARD:
            handlers = sorted(handlers + self._subscribers.get(WILDCARD, []))
        self._record.append((event, data))
        if len(self._record) > self._keep:
            del self._record[: len(self._record) - self._keep]
        for sub in handlers:
            self._call(sub, event, data)
        return len(handlers)

    def events(self, event: Optional[str] = None) -> List[Any]:
        """Payloads still in the record, oldest first; all events when `event` is None."""
        return [data for name, data in self._record if event is None or name == event]

    def _call(self, sub: Subscription, event: str, data: Any) -> None:
        try:
            sub.handler(event, data)
        except Exception as e:
            self.failures += 1
            if self._strict:
                raise
            logger.error(f"[EventBus] Handler '{sub.name}' failed on '{event}': {e}", exc_info=True)
