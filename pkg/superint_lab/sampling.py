"""
Seeded sampling of nonsingular phase points.

Configuration coordinates are drawn uniformly from a box in the chart,
bounded away from the chart's singular loci and, when a potential is given,
from its singular set; momenta are uniform in [-1, 1].
"""
import logging
import math

import numpy as np

from superint_lab.exceptions import DomainError, SamplingExhausted
from superint_lab.geometry import PhasePoint, get_chart
from superint_lab.utils import get_sampling_margin

logger = logging.getLogger(__name__)

RADIUS_RANGE = (0.5, 2.0)
AXIS_RANGE = (-1.0, 1.0)
MOMENTUM_RANGE = (-1.0, 1.0)
POLAR_ANGLE_MARGIN = 0.1


class PhaseSampler:
    """
    Parameters
    ----------
    chart : Chart
        Chart of the returned points.
    spec : PotentialSpec, optional
        Points closer than `margin` to its singular set are rejected.
    seed : int
    margin : float, optional
        Defaults to ``settings.SUPERINT_SAMPLING_MARGIN``.
    attempts : int
        Attempt budget per requested point.
    """

    def __init__(self, chart, spec=None, seed=0, margin=None, attempts=200):
        self.chart = chart
        self.spec = spec
        self.seed = seed
        self.margin = get_sampling_margin() if margin is None else margin
        self.attempts = attempts
        self.rng = np.random.default_rng(seed)
        self.rejected = 0
        if chart.name in ("cartesian", "jacobi"):
            if spec is None:
                raise DomainError("Sampling in the %s chart needs a potential to pick the angular chart" % chart.name)
            self.source = spec.chart()
        else:
            self.source = chart

    def _uniform(self, bounds, size=None):
        return self.rng.uniform(bounds[0], bounds[1], size=size)

    def _angle(self):
        return self.rng.uniform(-math.pi, math.pi)

    def _polar_angle(self):
        return self.rng.uniform(POLAR_ANGLE_MARGIN, math.pi - POLAR_ANGLE_MARGIN)

    def draw_q(self):
        chart = self.source
        r = self._uniform(RADIUS_RANGE)
        name = chart.name
        if name == "reduced_polar":
            return [r, self._angle()]
        if name in ("cylindrical3", "hyperspherical_cylindrical"):
            polar = [self._polar_angle() for _ in range(chart.dim - 3)]
            return [r] + polar + [self._angle(), self._uniform(AXIS_RANGE)]
        if name == "polar_plane":
            return [r, self._angle()] + list(self._uniform(AXIS_RANGE, 4))
        if name == "spherical4":
            return [r, self._angle(), self._polar_angle(), self._uniform(AXIS_RANGE)]
        raise DomainError("No sampling box for the %s chart" % name)

    def accept(self, q):
        chart = self.source
        if chart.clearance(q) <= 0.0:
            return False
        if self.spec is None:
            return True
        if chart.name == "reduced_polar":
            profile = self.spec.angular_profile()
            return profile.zero or profile.is_regular(q[1], margin=self.margin)
        x, _ = chart.to_cartesian(q, [0.0] * chart.dim)
        return self.spec.clearance(x) > self.margin

    def _point(self, q, p):
        point = PhasePoint(self.source.name, np.array(q), p)
        if self.chart.name == self.source.name:
            return point
        cartesian = self.source.inverse(point)
        if self.chart.name == "cartesian":
            return cartesian
        return self.chart.forward(cartesian)

    def sample(self, count):
        """`count` points; raises SamplingExhausted past the attempt budget."""
        points = []
        budget = self.attempts * max(count, 1)
        tries = 0
        while len(points) < count:
            if tries >= budget:
                raise SamplingExhausted(
                    "Only %s of %s nonsingular points in %s attempts (chart %s, margin %s)"
                    % (len(points), count, tries, self.chart.name, self.margin)
                )
            tries += 1
            q = self.draw_q()
            if not self.accept(q):
                self.rejected += 1
                continue
            p = self._uniform(MOMENTUM_RANGE, self.source.dim)
            points.append(self._point(q, p))
        logger.debug(
            "Sampled %s points in %s (%s rejected, seed %s)", count, self.chart.name, tries - count, self.seed
        )
        return points

    def describe(self):
        return {
            "chart": self.chart.name,
            "seed": self.seed,
            "margin": self.margin,
            "radius": list(RADIUS_RANGE),
            "axis": list(AXIS_RANGE),
            "momentum": list(MOMENTUM_RANGE),
        }


def sample_points(chart, count, seed, spec=None, margin=None, attempts=200):
    if isinstance(chart, str):
        chart = get_chart(chart, spec.particles if spec is not None else None)
    return PhaseSampler(chart, spec=spec, seed=seed, margin=margin, attempts=attempts).sample(count)
