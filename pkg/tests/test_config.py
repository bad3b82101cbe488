import pytest

from trms_ftc.config import CONTROLLER_PRESETS, load_scenario, scenario_from_dict
from trms_ftc.exceptions import ConfigError
from trms_ftc.params import TrmsParams, params_from_dict


class TestDefaults:
    def test_empty_document_is_the_flagship_scenario(self):
        cfg = scenario_from_dict({})
        assert cfg.bank.nodes == [-0.4, 0.0, 0.4]
        assert cfg.bank.sigma == 0.08
        assert cfg.fault.kind == "intermittent"
        assert cfg.fault.t_start == 25.0
        assert cfg.sim.t_end == 50.0
        assert cfg.sim.dt == 1e-3
        assert cfg.controller.type == "state_feedback"

    def test_controller_presets(self):
        assert CONTROLLER_PRESETS["state_feedback"] == (2.0, 700.0)
        cfg = scenario_from_dict({"fault": {"kind": "none"}})
        assert cfg.controller.knobs() == (2.0, 700.0)
        hinf = scenario_from_dict({"fault": {"kind": "none"},
                                   "controller": {"type": "hinf"}})
        assert hinf.controller.knobs() == CONTROLLER_PRESETS["hinf"]

    def test_explicit_knobs_override_preset(self):
        cfg = scenario_from_dict({"fault": {"kind": "none"},
                                  "controller": {"type": "hinf", "rho": 42.0}})
        zeta, rho = cfg.controller.knobs()
        assert rho == 42.0
        assert zeta == CONTROLLER_PRESETS["hinf"][0]


class TestValidation:
    @pytest.mark.parametrize("doc", [
        {"sim": {"dt": 0.0}},
        {"sim": {"t_end": -1.0}},
        {"fault": {"t_start": 30.0, "t_stop": 20.0}},
        {"fault": {"t_stop": 60.0}},
        {"bank": {"nodes": [0.4, -0.4]}},
        {"bank": {"sigma": -0.1}},
        {"bank": {"measured_states": [0, 7]}},
        {"sim": {"plant": "frozen"}},
        {"sim": {"initial_state": [1.0, 2.0]}},
        {"sim": {"initial_state": {"trim": [0.0]}}},
        {"unknown_section": {}},
        {"fault": {"kind": "step"}, "sim": {"t_end": 0.0}},
    ])
    def test_rejected_documents(self, doc):
        with pytest.raises(ConfigError):
            scenario_from_dict(doc)

    def test_input_injection_requires_column_faults(self):
        doc = {"fault": {"kind": "none"},
               "bank": {"l_matrix": [[0.0, 0.0]] * 6}}
        with pytest.raises(ConfigError, match="input-channel fault injection"):
            scenario_from_dict(doc)

    def test_frozen_plant_with_single_node_accepted(self):
        cfg = scenario_from_dict({"fault": {"kind": "none"},
                                  "bank": {"nodes": [0.0]},
                                  "sim": {"plant": "frozen"}})
        assert cfg.sim.plant == "frozen"

    def test_load_scenario_from_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{"fault": {"kind": "none"}}')
        assert load_scenario(str(path)).fault.kind == "none"


class TestParams:
    def test_defaults_match_published_constants(self):
        p = TrmsParams()
        assert p.j_v == 0.055448
        assert p.t_mr == 1.432
        assert p.k_h == 0.00545371
        assert p.g == 9.81

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown parameter"):
            params_from_dict({"mass_of_moon": 7e22})

    @pytest.mark.parametrize("field", ["j_v", "j_mr", "t_tr", "l_m", "g"])
    def test_positivity_enforced(self, field):
        with pytest.raises(ConfigError):
            params_from_dict({field: 0.0})

    def test_coefficient_lists_become_tuples(self):
        p = params_from_dict({"main_thrust_coeffs": [1e-3, 2e-2]})
        assert p.main_thrust_coeffs == (1e-3, 2e-2)

    def test_nonfinite_coefficients_rejected(self):
        with pytest.raises(ConfigError):
            params_from_dict({"tail_thrust_coeffs": [float("nan")]})

    def test_override_file_round_trip(self, tmp_path):
        from trms_ftc.params import load_params
        path = tmp_path / "params.json"
        path.write_text('{"k_v": 0.02, "u_sat": 3.0}')
        p = load_params(str(path))
        assert p.k_v == 0.02
        assert p.u_sat == 3.0
        assert p.j_v == TrmsParams().j_v

    def test_override_file_must_hold_an_object(self, tmp_path):
        from trms_ftc.params import load_params
        path = tmp_path / "params.json"
        path.write_text("[1, 2, 3]")
        with pytest.raises(ConfigError):
            load_params(str(path))
