"""Run configuration: JSON schema, defaults, validation.

The config file is JSON whose keys are exactly the RunConfig field names;
unknown keys are rejected so typos cannot silently change a run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields as dc_fields
from pathlib import Path

from .compressible import SCHEMES, LambdaPolicy, PhysParams
from .errors import ConfigError
from .fields import Grid, MollifierSpec
from .modulated import Subdomain

INIT_KINDS = ("well_prepared", "general")


@dataclass
class RunConfig:
    dim: int
    n: int
    box_len: float
    gamma: float
    alpha: float
    beta: float
    eps_list: list[float]
    T_final: float
    a: float | None = None
    lambda_policy: LambdaPolicy = field(default_factory=LambdaPolicy)
    cfl: float = 0.4
    scheme: str = "imex_acoustic"
    delta: float | None = None
    init_kind: str = "well_prepared"
    amp_acoustic: float = 0.5
    seed: int = 0
    diag_every: int = 20
    subdomain: Subdomain | None = None
    out_dir: str = "out"
    threads: int = 1
    acknowledge_wrap: bool = False

    def __post_init__(self):
        self.validate()

    # -- derived objects ----------------------------------------------------

    def grid(self) -> Grid:
        return Grid(self.dim, self.n, self.box_len)

    def phys_params(self, eps: float) -> PhysParams:
        p = PhysParams(
            eps=eps,
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            a=self.a,
            lambda_policy=self.lambda_policy,
        )
        p.validate_for_dim(self.dim)
        return p

    def mollifier(self) -> MollifierSpec:
        return MollifierSpec(delta=self.delta, kind="bump")

    def local_subdomain(self) -> Subdomain:
        if self.subdomain is not None:
            return self.subdomain
        quarter = self.box_len / 4.0
        return Subdomain(lo=(quarter,) * self.dim, hi=(3 * quarter,) * self.dim)

    # -- validation -----------------------------------------------------------

    def validate(self) -> None:
        Grid(self.dim, self.n, self.box_len)  # raises on bad dim/n/box_len
        if self.gamma <= 1:
            raise ConfigError(f"gamma must exceed 1, got {self.gamma}")
        if self.a is None:
            self.a = 1.0 / self.gamma
        if not 0 < self.alpha + self.beta < 2:
            raise ConfigError(
                f"alpha+beta must lie in (0,2), got {self.alpha + self.beta}"
            )
        if self.alpha <= 0 or self.beta <= 0:
            raise ConfigError("alpha and beta must be positive")
        if not self.eps_list:
            raise ConfigError("eps_list must not be empty")
        for e in self.eps_list:
            if not 0 < e < 1:
                raise ConfigError(f"every eps must lie in (0,1), got {e}")
        for a_, b_ in zip(self.eps_list, self.eps_list[1:]):
            if b_ >= a_:
                raise ConfigError("eps_list must be strictly decreasing")
        if self.T_final <= 0:
            raise ConfigError("T_final must be positive")
        if not 0 < self.cfl <= 1:
            raise ConfigError(f"cfl must lie in (0,1], got {self.cfl}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.delta is None:
            self.delta = 4.0 * self.box_len / self.n
        if not 0 < self.delta < self.box_len / 4:
            raise ConfigError(
                f"delta must lie in (0, box_len/4), got {self.delta}"
            )
        if self.init_kind not in INIT_KINDS:
            raise ConfigError(f"init_kind must be one of {INIT_KINDS}")
        if self.amp_acoustic < 0:
            raise ConfigError("amp_acoustic must be nonnegative")
        if self.diag_every < 1:
            raise ConfigError("diag_every must be a positive integer")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.subdomain is not None:
            for lo, hi in zip(self.subdomain.lo, self.subdomain.hi):
                if not (0 <= lo < hi <= self.box_len):
                    raise ConfigError("subdomain must be a nonempty box inside the domain")
        self.phys_params(self.eps_list[0])  # validates gamma/a/lambda policy
        if self.init_kind == "general" and not self.acknowledge_wrap:
            needed = 2.0 * self.T_final / max(self.eps_list)
            if not self.box_len > needed:
                raise ConfigError(
                    "general-data run leaves the dispersive window: needs "
                    f"box_len > 2*T_final/max(eps) = {needed:g} (or set "
                    '"acknowledge_wrap": true)'
                )

    # -- JSON -----------------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dc_fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "lambda_policy" in kwargs:
            kwargs["lambda_policy"] = _parse_lambda_policy(kwargs["lambda_policy"])
        if "subdomain" in kwargs and kwargs["subdomain"] is not None:
            kwargs["subdomain"] = _parse_subdomain(kwargs["subdomain"])
        if "eps_list" in kwargs:
            kwargs["eps_list"] = [float(e) for e in kwargs["eps_list"]]
        missing = {"dim", "n", "box_len", "gamma", "alpha", "beta", "eps_list", "T_final"} - set(kwargs)
        if missing:
            raise ConfigError(f"missing required config keys: {sorted(missing)}")
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config JSON must be an object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        out = {}
        for f in dc_fields(self):
            val = getattr(self, f.name)
            if isinstance(val, LambdaPolicy):
                val = val.kind if val.kind == "zero" else {"ratio": val.c}
            elif isinstance(val, Subdomain):
                val = {"lo": list(val.lo), "hi": list(val.hi)}
            out[f.name] = val
        return out


def _parse_lambda_policy(raw) -> LambdaPolicy:
    if isinstance(raw, LambdaPolicy):
        return raw
    if raw == "zero":
        return LambdaPolicy("zero")
    if isinstance(raw, dict) and set(raw) == {"ratio"}:
        return LambdaPolicy("ratio", float(raw["ratio"]))
    raise ConfigError(
        f'lambda_policy must be "zero" or {{"ratio": c}}, got {raw!r}'
    )


def _parse_subdomain(raw) -> Subdomain:
    if isinstance(raw, Subdomain):
        return raw
    if not (isinstance(raw, dict) and set(raw) == {"lo", "hi"}):
        raise ConfigError('subdomain must be {"lo": [...], "hi": [...]}')
    lo = tuple(float(x) for x in raw["lo"])
    hi = tuple(float(x) for x in raw["hi"])
    if len(lo) != len(hi):
        raise ConfigError("subdomain lo/hi must have the same dimension")
    return Subdomain(lo=lo, hi=hi)
