"""Planar domains shared by the samplers and the finite-difference oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError


@dataclass(frozen=True)
class Dumbbell:
    """Two ``box_size`` squares joined by a horizontal channel.

    The left box occupies ``[0, s] x [0, s]``, the channel
    ``[s, s + channel_length] x [(s - a)/2, (s + a)/2]`` and the right box
    starts at ``x = s + channel_length``.
    """

    box_size: float = 1.0
    channel_width: float = 0.1
    channel_length: float = 0.5

    def __post_init__(self):
        if not (self.box_size > 0 and self.channel_length > 0):
            raise GeometryError("box size and channel length must be positive")
        if not (0 < self.channel_width < self.box_size):
            raise GeometryError("channel width must lie in (0, box_size)")

    @property
    def width(self) -> float:
        return 2 * self.box_size + self.channel_length

    @property
    def bounds(self):
        return (0.0, self.width), (0.0, self.box_size)

    @property
    def midline(self) -> float:
        return self.box_size + 0.5 * self.channel_length

    @property
    def area(self) -> float:
        return 2 * self.box_size**2 + self.channel_width * self.channel_length

    def contains(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        x, y = p[..., 0], p[..., 1]
        s, a, ell = self.box_size, self.channel_width, self.channel_length
        in_y = (y >= 0) & (y <= s)
        left = (x >= 0) & (x <= s) & in_y
        right = (x >= s + ell) & (x <= 2 * s + ell) & in_y
        chan = (x > s) & (x < s + ell) & (np.abs(y - 0.5 * s) <= 0.5 * a)
        return left | right | chan

    def container(self, points) -> np.ndarray:
        """0 for the left container, 1 for the right; channel points go to the nearer one."""
        p = np.asarray(points, dtype=float)
        return (p[..., 0] > self.midline).astype(np.int64)
