from pathlib import Path

import pytest

from risnoma import config
from risnoma.mcsim import FadingMode
from risnoma.params import ConfigError, SystemParams


class TestRunConfig:
    def test_defaults(self):
        cfg = config.from_dict({})
        assert cfg.params == SystemParams()
        assert cfg.sweep_variable == "p_t_dbm"
        assert cfg.sweep_values == (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
        assert cfg.fading_mode is FadingMode.MODEL_FAITHFUL
        assert cfg.fit_mode == "moment"

    def test_params_at(self):
        cfg = config.from_dict({"sweep_variable": "n", "sweep_values": [1, 5, 10], "beta": 0.8})
        p = cfg.params_at(10)
        assert p.n == 10 and p.beta == 0.8

    def test_round_trip(self):
        cfg = config.from_dict(
            {
                "n": 7,
                "beta": 0.8,
                "p_t_dbm": 13.5,
                "sweep_variable": "rho_i",
                "sweep_values": [0.0, 0.25, 1.0],
                "trials": 12345,
                "seed": 2**63,
                "fading_mode": "physical",
                "fit_mode": "paper",
                "output_path": 'dir/"quoted".csv',
            }
        )
        assert config.loads(config.dumps(cfg)) == cfg

    def test_round_trip_defaults(self):
        cfg = config.from_dict({})
        assert config.loads(config.dumps(cfg)) == cfg

    def test_load_file(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text('n = 3\nsweep_values = [0, 10]\noutput_path = "x.csv"\n', encoding="utf-8")
        cfg = config.load(path)
        assert cfg.params.n == 3 and cfg.sweep_values == (0, 10)

    @pytest.mark.parametrize(
        "data",
        [
            {"bogus": 1},
            {"a_c": 0.5, "a_t": 0.5},
            {"alpha_t": 1.5},
            {"gamma_sic_th": 1.6},
            {"gamma_c_th": 2.0},
            {"sweep_values": []},
            {"sweep_variable": "lambda_b"},
            {"fit_mode": "exact"},
            {"fading_mode": "rician"},
            {"trials": 0},
            {"trials": 1.5},
            {"seed": -1},
            {"seed": 2**64},
            {"sweep_variable": "n", "sweep_values": [1, 0]},
            {"sweep_variable": "beta", "sweep_values": [0.5, 1.5]},
            {"beta": "high"},
        ],
    )
    def test_rejected(self, data):
        with pytest.raises(ConfigError):
            config.from_dict(data)

    def test_malformed_toml(self):
        with pytest.raises(ConfigError):
            config.loads("n = = 3")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            config.load(tmp_path / "absent.toml")


class TestShippedConfigs:
    ROOT = Path(__file__).resolve().parents[1] / "configs"

    def test_default(self):
        cfg = config.load(self.ROOT / "default.toml")
        assert cfg.params == SystemParams()
        assert cfg.sweep_values == (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
        assert cfg.trials == 1_000_000

    def test_elements_sweep(self):
        cfg = config.load(self.ROOT / "elements_sweep.toml")
        assert cfg.params.p_t_dbm == 20.0
        assert cfg.sweep_variable == "n" and cfg.sweep_values == tuple(range(1, 11))
