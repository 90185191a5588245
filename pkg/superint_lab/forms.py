"""
Validation of experiment configs.

A config is one JSON document::

    {
        "experiment": "verify",
        "system": {"family": "ttw", "params": {"n": 1, "k": 1.0}},
        "sampling": {"count": 200, "seed": 7},
        "integrator": {"dt": 0.001, "steps": 100000},
        "output": {"path": "out", "format": "json"},
        "options": {"fifth": true}
    }

Every block is validated by its own form; unknown keys are errors.
"""
import math
from dataclasses import dataclass, field
from typing import Optional

from django import forms
from django.core.exceptions import NON_FIELD_ERRORS

from superint_lab.dynamics import METHODS, IntegratorConfig
from superint_lab.exceptions import ConfigError, DomainError
from superint_lab.integrals import has_integral_set
from superint_lab.potentials import FAMILIES, PotentialSpec, build_potential
from superint_lab.utils import check_finite, get_sampling_margin

EXPERIMENTS = ("verify", "rank", "coeffs", "equivalence", "simulate")
SAMPLED_EXPERIMENTS = ("verify", "rank", "simulate")
SYSTEM_EXPERIMENTS = ("verify", "rank", "simulate")


class BlockForm(forms.Form):
    """
    A config block. Missing optional fields take `defaults`; keys that are
    not fields are reported as errors.
    """

    defaults = {}

    def __init__(self, data=None, *args, **kwargs):
        data = {} if data is None else data
        if not isinstance(data, dict):
            raise ConfigError("Config block must be an object, got %s" % type(data).__name__)
        self.unknown = sorted(set(data) - set(self.base_fields))
        super().__init__(data, *args, **kwargs)

    def clean(self):
        cleaned_data = super().clean()
        if self.unknown:
            raise forms.ValidationError("Unknown keys: %s" % ", ".join(self.unknown), code="unknown")
        for key, value in self.defaults.items():
            if cleaned_data.get(key) is None:
                cleaned_data[key] = value
        return cleaned_data

    def error_messages_list(self, prefix):
        messages = []
        for name, errors in self.errors.items():
            where = prefix if name == NON_FIELD_ERRORS else "%s.%s" % (prefix, name)
            messages.extend("%s: %s" % (where, error) for error in errors)
        return messages


class SystemForm(BlockForm):
    family = forms.ChoiceField(choices=[(name, name) for name in sorted(FAMILIES)])
    params = forms.JSONField(required=False)

    def clean(self):
        cleaned_data = super().clean()
        family = cleaned_data.get("family")
        params = cleaned_data.get("params") or {}
        if not isinstance(params, dict):
            raise forms.ValidationError("params must be an object")
        if family:
            try:
                cleaned_data["potential"] = build_potential(family, **params)
            except (DomainError, ConfigError) as e:
                raise forms.ValidationError(str(e), code="invalid_system")
        return cleaned_data


class SamplingForm(BlockForm):
    count = forms.IntegerField(required=False, min_value=1)
    seed = forms.IntegerField(min_value=0)
    margin = forms.FloatField(required=False, min_value=0.0)
    rank_points = forms.IntegerField(required=False, min_value=1)
    attempts = forms.IntegerField(required=False, min_value=1)

    defaults = {"count": 200, "rank_points": 20, "attempts": 200}

    def clean(self):
        cleaned_data = super().clean()
        if cleaned_data.get("margin") is None:
            cleaned_data["margin"] = get_sampling_margin()
        return cleaned_data


class IntegratorForm(BlockForm):
    dt = forms.FloatField(required=False)
    steps = forms.IntegerField(required=False, min_value=0)
    method = forms.ChoiceField(required=False, choices=[(name, name) for name in METHODS])
    guard_radius = forms.FloatField(required=False)
    max_force = forms.FloatField(required=False)
    log_every = forms.IntegerField(required=False, min_value=1)
    x0 = forms.JSONField(required=False)
    p0 = forms.JSONField(required=False)

    def clean(self):
        cleaned_data = super().clean()
        names = ("dt", "steps", "guard_radius", "max_force", "log_every")
        overrides = {name: cleaned_data.get(name) for name in names}
        overrides["method"] = cleaned_data.get("method") or None
        try:
            cleaned_data["config"] = IntegratorConfig.from_settings(**overrides)
            for name in ("x0", "p0"):
                if cleaned_data.get(name) is not None:
                    cleaned_data[name] = check_finite(cleaned_data[name], name).tolist()
        except (ValueError, TypeError) as e:
            raise forms.ValidationError(str(e), code="invalid_integrator")
        if (cleaned_data.get("x0") is None) != (cleaned_data.get("p0") is None):
            raise forms.ValidationError("x0 and p0 must be given together")
        return cleaned_data


class OutputForm(BlockForm):
    path = forms.CharField(required=False)
    format = forms.ChoiceField(required=False, choices=(("json", "json"), ("csv", "csv")))

    defaults = {"format": "json"}

    def clean(self):
        cleaned_data = super().clean()
        if not cleaned_data.get("path"):
            cleaned_data["path"] = None
        if not cleaned_data.get("format"):
            cleaned_data["format"] = "json"
        return cleaned_data


class OptionsForm(BlockForm):
    fifth = forms.BooleanField(required=False)
    negative_control = forms.BooleanField(required=False)
    duplicate = forms.BooleanField(required=False)
    n = forms.IntegerField(required=False, min_value=1)
    g = forms.FloatField(required=False, min_value=0.0)
    h = forms.FloatField(required=False, min_value=0.0)
    alpha = forms.FloatField(required=False)
    grid = forms.IntegerField(required=False, min_value=2)
    drift_tolerance = forms.FloatField(required=False, min_value=0.0)

    defaults = {"n": 1, "g": 1.0, "alpha": math.pi / 6, "grid": 10000, "drift_tolerance": 1e-5}

    def clean(self):
        cleaned_data = super().clean()
        if cleaned_data.get("h") is None:
            # matched coupling of the equivalence demonstration
            cleaned_data["h"] = 3.0 * cleaned_data["g"]
        return cleaned_data


BLOCKS = {
    "system": SystemForm,
    "sampling": SamplingForm,
    "integrator": IntegratorForm,
    "output": OutputForm,
    "options": OptionsForm,
}


class ExperimentConfigForm(BlockForm):
    experiment = forms.ChoiceField(choices=[(name, name) for name in EXPERIMENTS])
    system = forms.JSONField(required=False)
    sampling = forms.JSONField(required=False)
    integrator = forms.JSONField(required=False)
    output = forms.JSONField(required=False)
    options = forms.JSONField(required=False)

    def clean(self):
        cleaned_data = super().clean()
        experiment = cleaned_data.get("experiment")
        errors = []
        spec = None
        for name, form_class in BLOCKS.items():
            block = cleaned_data.get(name)
            needed = (name == "system" and experiment in SYSTEM_EXPERIMENTS) or (
                name == "sampling" and experiment in SAMPLED_EXPERIMENTS
            )
            if block is None and name in ("system", "sampling"):
                if needed:
                    errors.append("%s: This block is required for %s." % (name, experiment))
                cleaned_data[name] = {}
                continue
            try:
                form = form_class(block or {})
            except ConfigError as e:
                errors.append("%s: %s" % (name, e))
                continue
            if form.is_valid():
                cleaned_data[name] = form.cleaned_data
                spec = form.cleaned_data.get("potential", spec)
            else:
                errors.extend(form.error_messages_list(name))
        if experiment in SYSTEM_EXPERIMENTS and spec is not None and not has_integral_set(spec):
            errors.append("system: The %s family has no integral set for %s." % (spec.family, experiment))
        if errors:
            raise forms.ValidationError(errors)
        return cleaned_data


@dataclass
class ExperimentConfig:
    """A validated config with every default filled in."""

    experiment: str
    system: Optional[PotentialSpec]
    sampling: dict
    integrator: IntegratorConfig
    x0: Optional[list]
    p0: Optional[list]
    output: dict
    options: dict
    resolved: dict = field(default_factory=dict)

    @property
    def seed(self):
        return self.sampling.get("seed")


def parse_config(data, experiment=None, seed=None, n=None):
    """
    Validates `data` (the parsed JSON config) and returns an
    `ExperimentConfig`. `experiment`, `seed` and `n` override the document,
    as the command line does. Raises `ConfigError` with the form errors.
    """
    if not isinstance(data, dict):
        raise ConfigError("Config must be a JSON object")
    data = dict(data)
    if experiment is not None:
        data["experiment"] = experiment
    if seed is not None:
        data["sampling"] = dict(data.get("sampling") or {}, seed=seed)
    if n is not None:
        data["options"] = dict(data.get("options") or {}, n=n)

    form = ExperimentConfigForm(data)
    if not form.is_valid():
        messages = form.error_messages_list("config")
        raise ConfigError("Invalid config:\n  %s" % "\n  ".join(messages), errors=form.errors.get_json_data())

    cleaned_data = form.cleaned_data
    system = cleaned_data["system"]
    spec = system.get("potential")
    integrator = cleaned_data["integrator"]
    sampling = {key: cleaned_data["sampling"].get(key) for key in SamplingForm.base_fields}
    output = {key: cleaned_data["output"][key] for key in OutputForm.base_fields}
    options = {key: cleaned_data["options"][key] for key in OptionsForm.base_fields}
    resolved = {
        "experiment": cleaned_data["experiment"],
        "system": {"family": spec.family, "params": spec.params()} if spec is not None else None,
        "sampling": sampling if cleaned_data["experiment"] in SAMPLED_EXPERIMENTS else None,
        "integrator": dict(integrator["config"].as_dict(), x0=integrator.get("x0"), p0=integrator.get("p0"))
        if cleaned_data["experiment"] == "simulate"
        else None,
        "output": output,
        "options": options,
    }
    return ExperimentConfig(
        experiment=cleaned_data["experiment"],
        system=spec,
        sampling=sampling,
        integrator=integrator["config"],
        x0=integrator.get("x0"),
        p0=integrator.get("p0"),
        output=output,
        options=options,
        resolved=resolved,
    )
