"""
In-process message bus between the local and the central node.

Delivers payloads unchanged and counts what goes over it. Only law packets are
charged bytes; state requests count as messages.
"""

import numpy as np


class MessageBus:
    def __init__(self) -> None:
        self.messages = 0
        self.bytes_tx = 0
        self.packets = 0

    def request(self, x: np.ndarray) -> np.ndarray:
        self.messages += 1
        return np.array(x, dtype=float)

    def deliver(self, payload: bytes) -> bytes:
        self.messages += 1
        self.packets += 1
        self.bytes_tx += len(payload)
        return payload
