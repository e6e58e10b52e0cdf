import pytest

from spikecl.config import OUTPUT_DIR_ENV, ConfigError, RunConfig, load_config


class TestDefaults:
    def test_mirror_ucr_row(self):
        c = load_config()
        assert c.neuron.tau_m == [20.0, 5.0] and c.neuron.tau_s == [150.0, 10.0] and c.neuron.tau == [20.0, 5.0]
        assert c.neuron.init_a == 20.0 and c.curriculum.start_percent == 0.05 and c.curriculum.step_length == 50
        assert c.optimizer.learning_rate == 1e-2 and c.optimizer.lr_decay == 0.5 and c.optimizer.decay_every == 10
        assert c.encoder.intervals == 5 and c.encoder.cluster_size == 16 and c.encoder.n_input == 80

    def test_initial_membrane_range(self):
        assert RunConfig().v_init_high == pytest.approx(20.018, abs=1e-12)
        c = load_config(overrides=["neuron.random_init=false"])
        assert c.v_init_high == 0.0

    def test_seeds(self):
        c = load_config(overrides=["experiment.seed=4", "experiment.n_seeds=3"])
        assert c.seeds == [4, 5, 6]


class TestFile:
    def test_read_and_override(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("[data]\nsource = ucr\npath = train.tsv\n[network]\nhidden = 8, 4\n[optimizer]\ngrad_clip = 1.5\n")
        c = load_config(p, ["curriculum.mode=D2A", "optimizer.epochs=3"])
        assert c.data.path == str(tmp_path / "train.tsv")
        assert c.network.hidden == [8, 4] and c.optimizer.grad_clip == 1.5
        assert c.curriculum.mode == "D2A" and c.optimizer.epochs == 3
        assert c.overrides == ["curriculum.mode=D2A", "optimizer.epochs=3"]
        assert c.to_dict()["curriculum"]["mode"] == "D2A"

    def test_ini_round_trip(self, tmp_path):
        c = load_config(overrides=["network.hidden=16,8", "optimizer.truncation=20", "data.noise=0.3"])
        p = tmp_path / "again.cfg"
        p.write_text(c.to_ini())
        back = load_config(p)
        assert back.to_dict() == {**c.to_dict(), "overrides": []}

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "nope.cfg")

    def test_unknown_section_and_key(self, tmp_path):
        p = tmp_path / "x.cfg"
        p.write_text("[bogus]\na = 1\n")
        with pytest.raises(ConfigError, match="bogus"):
            load_config(p)
        with pytest.raises(ConfigError, match="network.widths"):
            load_config(overrides=["network.widths=3"])


class TestValidation:
    @pytest.mark.parametrize(
        "override, field",
        [
            ("optimizer.learning_rate=-1", "optimizer.learning_rate"),
            ("curriculum.start_percent=0", "curriculum.start_percent"),
            ("curriculum.mode=Sideways", "curriculum.mode"),
            ("encoder.mode=Dense", "encoder.mode"),
            ("neuron.tau_m=20", "neuron.tau_m"),
            ("neuron.v0_mode=guess", "neuron.v0_mode"),
            ("data.kind=Square", "data.kind"),
            ("data.source=ucr", "data.path"),
            ("network.hidden=4,0", "network.hidden"),
            ("optimizer.epochs=ten", "optimizer.epochs"),
            ("network.recurrent=maybe", "network.recurrent"),
        ],
    )
    def test_message_names_field(self, override, field):
        with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
            load_config(overrides=[override])

    def test_malformed_override(self):
        with pytest.raises(ConfigError, match="section.key=value"):
            load_config(overrides=["epochs=3"])

    def test_class_count_must_match_outputs(self):
        c = load_config(overrides=["network.n_classes=2"])
        c.check_data(2)
        with pytest.raises(ConfigError, match="network.n_classes"):
            c.check_data(3)


def test_output_dir_env(monkeypatch):
    c = load_config(overrides=["experiment.output_dir=from_config"])
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)
    assert str(c.output_dir) == "from_config"
    monkeypatch.setenv(OUTPUT_DIR_ENV, "/tmp/from_env")
    assert str(c.output_dir) == "/tmp/from_env"
