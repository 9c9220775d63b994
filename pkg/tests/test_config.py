import json

import numpy as np
import pytest

from mhdlab.compressible import LambdaPolicy
from mhdlab.config import RunConfig
from mhdlab.errors import ConfigError

VALID = dict(
    dim=2,
    n=64,
    box_len=2 * np.pi,
    gamma=1.4,
    alpha=0.5,
    beta=0.5,
    eps_list=[0.25, 0.125],
    T_final=0.5,
)


def make(**overrides):
    data = dict(VALID)
    data.update(overrides)
    return RunConfig.from_dict(data)


class TestDefaults:
    def test_happy_path_fills_defaults(self):
        cfg = make()
        assert cfg.a == pytest.approx(1.0 / 1.4)
        assert cfg.cfl == 0.4
        assert cfg.scheme == "imex_acoustic"
        assert cfg.delta == pytest.approx(4 * cfg.box_len / cfg.n)
        assert cfg.init_kind == "well_prepared"
        assert cfg.threads == 1
        assert cfg.lambda_policy == LambdaPolicy("zero")
        sub = cfg.local_subdomain()
        assert sub.lo == (cfg.box_len / 4,) * 2

    def test_to_dict_round_trip(self):
        cfg = make(lambda_policy={"ratio": -0.25}, subdomain={"lo": [0, 0], "hi": [1, 1]})
        again = RunConfig.from_dict(cfg.to_dict())
        assert again == cfg


class TestRejections:
    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown config keys"):
            make(typo_key=1)

    def test_missing_required(self):
        data = dict(VALID)
        del data["gamma"]
        with pytest.raises(ConfigError, match="missing required"):
            RunConfig.from_dict(data)

    @pytest.mark.parametrize(
        "overrides",
        [
            dict(alpha=1.2, beta=0.9),          # alpha+beta >= 2
            dict(alpha=-0.1),
            dict(eps_list=[0.25, 0.5]),          # not decreasing
            dict(eps_list=[1.5, 0.5]),           # out of (0,1)
            dict(eps_list=[]),
            dict(T_final=0.0),
            dict(cfl=1.5),
            dict(scheme="leapfrog"),
            dict(n=48),
            dict(dim=4),
            dict(delta=10.0),                    # >= box_len/4
            dict(init_kind="odd"),
            dict(amp_acoustic=-1.0),
            dict(diag_every=0),
            dict(threads=0),
            dict(gamma=1.0),
            dict(subdomain={"lo": [0, 0], "hi": [100.0, 1.0]}),
            dict(lambda_policy="linear"),
            dict(lambda_policy={"ratio": -3.0}),  # violates 2mu+d*lambda >= 0
        ],
    )
    def test_invalid_values(self, overrides):
        with pytest.raises(ConfigError):
            make(**overrides)

    def test_general_requires_dispersive_window_or_flag(self):
        bad = dict(init_kind="general", box_len=2 * np.pi, T_final=2.0)
        with pytest.raises(ConfigError, match="dispersive window"):
            make(**bad)
        ok = make(init_kind="general", box_len=2 * np.pi, T_final=2.0, acknowledge_wrap=True)
        assert ok.acknowledge_wrap

    def test_general_inside_window_accepted(self):
        cfg = make(init_kind="general", box_len=16.0, T_final=0.5)
        assert cfg.init_kind == "general"


class TestJsonLoading:
    def test_from_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(VALID))
        cfg = RunConfig.from_json(path)
        assert cfg.n == 64

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            RunConfig.from_json(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            RunConfig.from_json(path)

    def test_non_object_json(self, tmp_path):
        path = tmp_path / "arr.json"
        path.write_text("[1,2,3]")
        with pytest.raises(ConfigError, match="must be an object"):
            RunConfig.from_json(path)
