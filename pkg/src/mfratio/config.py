"""Experiment configuration: parsing, defaults and up-front validation.

A config is a flat YAML (or JSON) mapping, e.g.::

    process: cascade
    family: lognormal
    lambda2: 0.1
    n: 10
    chi: 0.5
    q: [2]

Model keys by family: ``lambda2`` (lognormal); ``atoms`` + ``probs`` or
``s2`` (poisson); ``alpha`` + ``sigma`` (stable).  ``log_base`` defaults to
``base2`` for cascades and ``natural`` otherwise.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import yaml

from .errors import (ConditionViolated, InvalidH, MultifractalError, ParseError,
                     ValidationError, ValidityError)
from .estimators import asymptotic_rate
from .grid import blocks_for
from .harness import MIN_REPLICATIONS, theorem_process
from .mrw import check_walk
from .scaling import BASE2, NATURAL, ScalingModel, critical_exponents, psi_prime

PROCESSES = ("cascade", "mrm", "mrw")
THEOREMS = {"cascade-clt": "cascade", "mrm-clt": "mrm", "mrw-clt": "mrw"}
MODEL_KEYS = {"lognormal": ("lambda2",), "poisson": (), "stable": ("alpha", "sigma")}
KNOWN_KEYS = {"process", "family", "lambda2", "atoms", "probs", "s2", "alpha", "sigma",
              "log_base", "H", "n", "chi", "T", "q", "q_list", "levels", "R", "seed",
              "master_seed", "oversample", "g", "depth_extra", "theorem", "outputs"}


@dataclass
class ExperimentConfig:
    process: str
    model: ScalingModel
    n: int
    chi: float
    q_list: list
    H: float = None
    T: float = 1.0
    levels: list = None
    R: int = 200
    master_seed: int = 0
    oversample: int = 3
    depth_extra: int = 12
    theorem: str = None
    outputs: dict = field(default_factory=dict)

    @property
    def L(self):
        return blocks_for(self.n, self.chi)

    def with_overrides(self, **kw):
        d = dict(self.__dict__)
        d.update({k: v for k, v in kw.items() if v is not None})
        return ExperimentConfig(**d)


def _line_of(node, key):
    if isinstance(node, yaml.MappingNode):
        for k, _ in node.value:
            if k.value == key:
                return k.start_mark.line + 1
    return None


def _load(source):
    if isinstance(source, dict):
        return dict(source), None
    text = str(source)
    if "\n" not in text and os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    try:
        data = yaml.safe_load(text)
        node = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}: " if mark is not None else ""
        raise ParseError(f"{where}{getattr(exc, 'problem', exc)}") from None
    if not isinstance(data, dict):
        raise ParseError("config must be a key/value mapping")
    return data, node


def _model(data, process, node):
    family = data.get("family")
    if family is None:
        raise ParseError("missing key 'family'")
    family = str(family).lower()
    if family not in MODEL_KEYS:
        raise ParseError(f"line {_line_of(node, 'family')}, key 'family': unknown family {family!r}")
    base = data.get("log_base", BASE2 if process == "cascade" else NATURAL)
    if family == "lognormal":
        _require(data, ("lambda2",))
        return ScalingModel.lognormal(data["lambda2"], base)
    if family == "stable":
        _require(data, ("alpha", "sigma"))
        return ScalingModel.stable(data["alpha"], data["sigma"], base)
    if "s2" in data:
        return ScalingModel.poisson_lognormal(data["s2"], base)
    _require(data, ("atoms", "probs"))
    return ScalingModel.poisson_discrete(data["atoms"], data["probs"], base)


def _require(data, keys):
    for k in keys:
        if k not in data:
            raise ParseError(f"missing key {k!r}")


def _number(data, key, kind, default, node):
    if key not in data:
        return default
    try:
        v = kind(data[key])
        if kind is int and v != data[key]:
            raise ValueError
        return v
    except (TypeError, ValueError):
        raise ParseError(f"line {_line_of(node, key)}, key {key!r}: expected {kind.__name__}, "
                         f"got {data[key]!r}") from None


def parse_config(source):
    """Parse a path, inline text or mapping into a validated :class:`ExperimentConfig`."""
    data, node = _load(source)
    unknown = sorted(set(data) - KNOWN_KEYS)
    if unknown:
        raise ParseError(f"line {_line_of(node, unknown[0])}, key {unknown[0]!r}: unknown key")
    _require(data, ("process", "n"))
    process = str(data["process"]).lower()
    if process not in PROCESSES:
        raise ParseError(f"line {_line_of(node, 'process')}, key 'process': "
                         f"expected one of {PROCESSES}, got {process!r}")
    try:
        model = _model(data, process, node)
    except MultifractalError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ValidationError([str(exc)]) from None

    q = data.get("q", data.get("q_list"))
    if q is None:
        raise ParseError("missing key 'q'")
    try:
        q_list = [float(v) for v in (q if isinstance(q, (list, tuple)) else [q])]
        levels = data.get("levels")
        if levels is not None:
            levels = [int(v) for v in levels]
    except (TypeError, ValueError):
        raise ParseError("keys 'q' and 'levels' must hold numbers") from None
    cfg = ExperimentConfig(
        process=process, model=model,
        n=_number(data, "n", int, None, node),
        chi=_number(data, "chi", float, 0.0, node),
        q_list=q_list,
        H=_number(data, "H", float, 0.5 if process == "mrw" else None, node),
        T=_number(data, "T", float, 1.0, node),
        levels=levels,
        R=_number(data, "R", int, 200, node),
        master_seed=_number(data, "master_seed", int, _number(data, "seed", int, 0, node), node),
        oversample=_number(data, "oversample", int, _number(data, "g", int, 3, node), node),
        depth_extra=_number(data, "depth_extra", int, 12, node),
        theorem=data.get("theorem"),
        outputs=dict(data.get("outputs") or {}),
    )
    validate(cfg)
    return cfg


def validate(cfg):
    """Collect every violated precondition of ``cfg`` and raise them together."""
    bad = []
    if cfg.n < 1:
        bad.append(f"n ≥ 1 (n = {cfg.n})")
    if cfg.chi < 0:
        bad.append(f"χ ≥ 0 (χ = {cfg.chi})")
    if not cfg.T > 0:
        bad.append(f"T > 0 (T = {cfg.T})")
    if cfg.R < MIN_REPLICATIONS:
        bad.append(f"R ≥ {MIN_REPLICATIONS} (R = {cfg.R})")
    if cfg.oversample < 0 or cfg.depth_extra < 0:
        bad.append("oversample and depth_extra must be ≥ 0")
    if any(q < 0 or not math.isfinite(q) for q in cfg.q_list):
        bad.append("q values must be finite and ≥ 0")
    if cfg.levels is not None and (len(cfg.levels) < 1 or min(cfg.levels) < 1):
        bad.append("levels must be positive integers")
    if cfg.process != "mrw" and cfg.H is not None:
        bad.append("H applies to process mrw only")
    if cfg.process == "cascade" and cfg.model.log_base != BASE2:
        bad.append("cascades use log_base base2")
    if cfg.process != "cascade" and cfg.model.log_base != NATURAL:
        bad.append("measures and walks use log_base natural")
    if cfg.process == "mrw":
        try:
            check_walk(cfg.model, cfg.H)
        except (InvalidH, ValidityError) as exc:
            bad.append(str(exc))

    d1 = float(psi_prime(cfg.model, 1.0))
    if d1 >= 1:
        bad.append(f"ψ'(1) < 1 (ψ'(1) = {d1:.6g})")
    elif not bad:
        q_chi = critical_exponents(cfg.model, cfg.chi).q_chi
        for q in cfg.q_list:
            if not q < q_chi:
                bad.append(f"q ≥ q_χ = {q_chi:.4g} (q = {q:g})")
        if cfg.theorem is not None:
            target = THEOREMS.get(cfg.theorem)
            if target is None:
                bad.append(f"theorem must be one of {sorted(THEOREMS)}")
            elif target != cfg.process:
                bad.append(f"theorem {cfg.theorem} does not apply to process {cfg.process}")
            else:
                for q in cfg.q_list:
                    try:
                        asymptotic_rate(cfg.model, theorem_process(cfg), q, cfg.chi, cfg.H)
                    except ConditionViolated as exc:
                        bad.append(str(exc))
    if bad:
        raise ValidationError(bad)
    return cfg
