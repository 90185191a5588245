"""
Closed-form angular profiles F(psi) and ratio functions F(t).

Profiles are plain callables written with the `superint_lab.dual` helpers,
so derivatives are exact. Config files select them by name from the
`register` library below; there is no expression parsing.
"""
import logging
import math

import numpy as np

from superint_lab import dual
from superint_lab.exceptions import ConfigError

logger = logging.getLogger(__name__)

FD_STEP = 1e-6


class AngularProfile:
    """
    A function of one or more angles returning an energy.

    Parameters
    ----------
    func : callable
        ``func(*angles)``; must accept floats and `dual.Dual` values.
    name : str
        Registry name, echoed in reports.
    params : dict, optional
        Parameters the profile was built with.
    clearance : callable, optional
        ``clearance(*angles)`` returns a non-negative number that vanishes on
        the singular set (e.g. ``|sin 3psi|``). By default the profile has no
        singularities.
    exact : bool
        False when derivatives come from finite differences.
    zero : bool
        Marks the identically vanishing profile (free motion).
    arity : int
        Number of angles.
    """

    def __init__(self, func, name="", params=None, clearance=None, exact=True, zero=False, arity=1):
        self.func = func
        self.name = name
        self.params = dict(params or {})
        self._clearance = clearance
        self.exact = exact
        self.zero = zero
        self.arity = arity

    def __call__(self, *angles):
        return self.func(*angles)

    def __repr__(self):
        return "<AngularProfile %s %s>" % (self.name, self.params)

    def derivative(self, *angles):
        """dF/dpsi for one angle, the gradient over all angles otherwise."""
        _, grad = dual.gradient(self.func, [float(a) for a in angles])
        if self.arity == 1:
            return float(grad[0])
        return grad

    def clearance(self, *angles):
        if self._clearance is None:
            return math.inf
        return float(self._clearance(*[dual.value(a) for a in angles]))

    def is_regular(self, *angles, margin=0.0):
        return self.clearance(*angles) > margin

    def describe(self):
        description = {"name": self.name, "params": self.params}
        if not self.exact:
            description["derivative"] = "finite_difference"
        return description

    def without_derivative(self, step=FD_STEP):
        """
        The same profile with the derivative replaced by central differences.
        Bracket checks built on it are only good to about 1e-5.
        """
        logger.warning("Profile %s uses the finite-difference derivative fallback", self.name)
        return from_callable(
            lambda *angles: self.func(*[float(a) for a in angles]),
            name=self.name,
            params=self.params,
            clearance=self._clearance,
            arity=self.arity,
            step=step,
        )


def from_callable(func, derivative=None, name="custom", params=None, clearance=None, arity=1, step=FD_STEP):
    """
    Wraps a float-only callable as a profile. With `derivative` the profile is
    exact; without it, central differences of step `step` stand in.
    """

    def evaluate(*angles):
        values = [dual.value(a) for a in angles]
        result = func(*values)
        if not any(isinstance(a, dual.Dual) for a in angles):
            return result
        if derivative is not None:
            grad = np.atleast_1d(derivative(*values))
        else:
            grad = np.empty(arity)
            for i in range(arity):
                plus, minus = list(values), list(values)
                plus[i] += step
                minus[i] -= step
                grad[i] = (func(*plus) - func(*minus)) / (2 * step)
        dx = 0.0
        for g, a in zip(grad, angles):
            if isinstance(a, dual.Dual):
                dx = dx + g * a.dx
        return dual.Dual(result, dx)

    return AngularProfile(
        evaluate, name=name, params=params, clearance=clearance, exact=derivative is not None, arity=arity
    )


class RatioFunction:
    """A function F(t) of a ratio of difference coordinates, e.g. X2/X1."""

    def __init__(self, func, name="", params=None, clearance=None, zero=False):
        self.func = func
        self.name = name
        self.params = dict(params or {})
        self._clearance = clearance
        self.zero = zero

    def __call__(self, t):
        return self.func(t)

    def __repr__(self):
        return "<RatioFunction %s %s>" % (self.name, self.params)

    def clearance(self, t):
        if self._clearance is None:
            return math.inf
        return float(self._clearance(dual.value(t)))

    def describe(self):
        return {"name": self.name, "params": self.params}


class ProfileLibrary:
    """
    Registry of named profile builders. Works like Django's template
    ``Library``::

        register = ProfileLibrary()

        @register.profile(name="constant")
        def constant(c=1.0):
            ...
    """

    def __init__(self):
        self.profiles = {}
        self.ratios = {}

    def profile(self, name):
        def decorator(builder):
            self.profiles[name] = builder
            return builder

        return decorator

    def ratio(self, name):
        def decorator(builder):
            self.ratios[name] = builder
            return builder

        return decorator

    def get_profile(self, name, **params):
        return self._build(self.profiles, "profile", name, params)

    def get_ratio(self, name, **params):
        return self._build(self.ratios, "ratio function", name, params)

    def _build(self, table, kind, name, params):
        try:
            builder = table[name]
        except KeyError:
            raise ConfigError("Unknown %s %r; registered: %s" % (kind, name, ", ".join(sorted(table))))
        try:
            return builder(**params)
        except TypeError as e:
            raise ConfigError("Bad parameters for %s %r: %s" % (kind, name, e))


register = ProfileLibrary()


@register.profile(name="zero")
def zero():
    return AngularProfile(lambda *angles: 0.0, name="zero", zero=True)


@register.profile(name="constant")
def constant(c=1.0):
    c = float(c)
    return AngularProfile(lambda psi: c, name="constant", params={"c": c}, zero=c == 0.0)


@register.profile(name="inverse_sin2")
def inverse_sin2(k=1.0, m=1, phase=0.0):
    """k / sin^2(m psi + phase)"""
    k, m, phase = float(k), float(m), float(phase)
    return AngularProfile(
        lambda psi: k / dual.sin(m * psi + phase) ** 2,
        name="inverse_sin2",
        params={"k": k, "m": m, "phase": phase},
        clearance=lambda psi: abs(math.sin(m * psi + phase)),
    )


@register.profile(name="inverse_cos2")
def inverse_cos2(k=1.0, m=1, phase=0.0):
    """k / cos^2(m psi + phase)"""
    k, m, phase = float(k), float(m), float(phase)
    return AngularProfile(
        lambda psi: k / dual.cos(m * psi + phase) ** 2,
        name="inverse_cos2",
        params={"k": k, "m": m, "phase": phase},
        clearance=lambda psi: abs(math.cos(m * psi + phase)),
    )


@register.profile(name="ttw")
def ttw(n=1, k=1.0):
    """k / sin^2((2n + 1) psi)"""
    profile = inverse_sin2(k=k, m=2 * int(n) + 1)
    profile.name = "ttw"
    profile.params = {"n": int(n), "k": float(k)}
    return profile


@register.profile(name="cos2")
def cos2(a=0.0, b=1.0):
    """a + b cos(2 psi)"""
    a, b = float(a), float(b)
    return AngularProfile(lambda psi: a + b * dual.cos(2.0 * psi), name="cos2", params={"a": a, "b": b})


@register.profile(name="inverse_cos2_sin2")
def inverse_cos2_sin2(a=1.0, b=1.0):
    """a / cos^2(psi) + b / sin^2(psi)"""
    a, b = float(a), float(b)
    return AngularProfile(
        lambda psi: a / dual.cos(psi) ** 2 + b / dual.sin(psi) ** 2,
        name="inverse_cos2_sin2",
        params={"a": a, "b": b},
        clearance=lambda psi: min(abs(math.cos(psi)), abs(math.sin(psi))),
    )


def _polynomial(coefficients, t):
    result = 0.0
    for c in reversed(coefficients):
        result = result * t + c
    return result


@register.ratio(name="zero")
def zero_ratio():
    return RatioFunction(lambda t: 0.0, name="zero", zero=True)


@register.ratio(name="constant")
def constant_ratio(c=1.0):
    c = float(c)
    return RatioFunction(lambda t: c, name="constant", params={"c": c}, zero=c == 0.0)


@register.ratio(name="polynomial")
def polynomial_ratio(coefficients=(0.0, 1.0)):
    """c0 + c1 t + c2 t^2 + ..."""
    coefficients = [float(c) for c in coefficients]
    return RatioFunction(
        lambda t: _polynomial(coefficients, t), name="polynomial", params={"coefficients": coefficients}
    )


@register.ratio(name="rational")
def rational_ratio(numerator=(1.0,), denominator=(1.0, 0.0, 1.0)):
    """(n0 + n1 t + ...) / (d0 + d1 t + ...)"""
    numerator = [float(c) for c in numerator]
    denominator = [float(c) for c in denominator]
    return RatioFunction(
        lambda t: _polynomial(numerator, t) / _polynomial(denominator, t),
        name="rational",
        params={"numerator": numerator, "denominator": denominator},
        clearance=lambda t: abs(_polynomial(denominator, t)),
    )


def build_profile(description):
    """
    Builds a profile from its config description,
    ``{"name": ..., "params": {...}, "derivative": "exact" | "finite_difference"}``.
    """
    if isinstance(description, AngularProfile):
        return description
    description = dict(description)
    profile = register.get_profile(description.pop("name"), **description.pop("params", {}))
    derivative = description.pop("derivative", "exact")
    if description:
        raise ConfigError("Unknown profile keys: %s" % ", ".join(sorted(description)))
    if derivative == "finite_difference":
        return profile.without_derivative()
    if derivative != "exact":
        raise ConfigError("derivative must be 'exact' or 'finite_difference', got %r" % derivative)
    return profile


def build_ratio(description):
    if isinstance(description, RatioFunction):
        return description
    description = dict(description)
    ratio = register.get_ratio(description.pop("name"), **description.pop("params", {}))
    if description:
        raise ConfigError("Unknown ratio function keys: %s" % ", ".join(sorted(description)))
    return ratio
