import os

import pytest

from adasample.config import RunConfig, parse_config, parse_config_text
from adasample.errors import ConfigError, DataError

MINIMAL = """
experiment = smoke
generator = gaussian
"""


def write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestParsing:
    def test_minimal_config_applies_documented_defaults(self):
        cfg = parse_config_text(MINIMAL)
        assert cfg.experiment == "smoke"
        assert cfg.alpha == 0.9
        assert cfg.beta == 1.0
        assert cfg.mode == "adaptive"
        assert cfg.seeds == (0,)
        # synthetic-only default batch: all generated data
        assert cfg.values["train.batch_size"] == 16
        assert cfg.values["train.real_per_batch"] == 0
        assert cfg.values["train.synth_per_batch"] == 16

    def test_mnist_defaults_mix_real_and_synth(self, fixtures_dir):
        cfg = parse_config_text(
            "experiment = m\n"
            "generator = mnist\n"
            f"mnist.images = {fixtures_dir / 'mini_images.idx'}\n"
            f"mnist.labels = {fixtures_dir / 'mini_labels.idx'}\n"
        )
        assert cfg.values["train.batch_size"] == 76
        assert cfg.values["train.real_per_batch"] == 60
        assert cfg.values["train.synth_per_batch"] == 16

    def test_unknown_key_is_an_error_with_line(self):
        with pytest.raises(ConfigError, match="line 3|:3"):
            parse_config_text("experiment = x\ngenerator = gaussian\nbetaa = 2\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text(MINIMAL + "update.alpha = 0.5\nupdate.alpha = 0.6\n")

    def test_alpha_out_of_range_names_key(self):
        with pytest.raises(ConfigError, match="alpha"):
            parse_config_text(MINIMAL + "update.alpha = 1.5\n")

    def test_beta_overflow_guard(self):
        with pytest.raises(ConfigError, match="beta"):
            parse_config_text(MINIMAL + "update.beta = 701\n")

    def test_duplicate_seeds_rejected(self):
        with pytest.raises(ConfigError, match="seeds"):
            parse_config_text(MINIMAL + "seeds = 7,7\n")

    def test_bad_value_type_reports_key_and_line(self):
        with pytest.raises(ConfigError, match="probe.per_bucket"):
            parse_config_text(MINIMAL + "probe.per_bucket = many\n")

    def test_missing_experiment(self):
        with pytest.raises(ConfigError, match="experiment"):
            parse_config_text("generator = gaussian\n")

    def test_unknown_generator(self):
        with pytest.raises(ConfigError, match="generator"):
            parse_config_text("experiment = x\ngenerator = quantum\n")

    def test_missing_mnist_paths_is_config_error(self):
        with pytest.raises(ConfigError, match="mnist.images"):
            parse_config_text("experiment = x\ngenerator = mnist\n")

    def test_absent_mnist_file_is_data_error(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            parse_config_text(
                "experiment = x\ngenerator = mnist\n"
                f"mnist.images = {tmp_path / 'nope.idx'}\n"
                f"mnist.labels = {tmp_path / 'nope2.idx'}\n"
            )

    def test_comments_and_blank_lines_ignored(self):
        cfg = parse_config_text("# a comment\n\nexperiment = x\n# another\ngenerator = gaussian\n")
        assert cfg.experiment == "x"

    def test_line_without_equals_rejected(self):
        with pytest.raises(ConfigError, match="key = value"):
            parse_config_text("experiment\n")

    def test_overrides_win_and_are_validated(self):
        cfg = parse_config_text(MINIMAL, overrides={"update.alpha": "0.3"})
        assert cfg.alpha == 0.3
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config_text(MINIMAL, overrides={"alpha": "0.3"})

    def test_gaussian_noise_broadcast_and_length_check(self):
        cfg = parse_config_text(MINIMAL + "gaussian.noise = 0.2\ngaussian.sectors = 4\n")
        gen, _, _ = cfg.make_generator()
        assert gen.spec.sector_noise == (0.2, 0.2, 0.2, 0.2)
        with pytest.raises(ConfigError, match="noise"):
            parse_config_text(MINIMAL + "gaussian.noise = 0.2,0.3\ngaussian.sectors = 4\n")

    def test_train_mix_validated(self):
        with pytest.raises(ConfigError, match="mix|sum"):
            parse_config_text(
                MINIMAL + "train.batch_size = 10\ntrain.real_per_batch = 0\ntrain.synth_per_batch = 4\n"
            )


class TestSnapshotRoundTrip:
    def test_round_trip_is_identity(self):
        cfg = parse_config_text(
            MINIMAL + "update.alpha = 0.35\nupdate.beta = 2.5\nseeds = 3,5,8\n"
            "gaussian.noise = 0.1,0.1,1.5,0.1\nloop.iterations = 1234\n"
        )
        again = parse_config_text(cfg.snapshot())
        assert again == cfg
        assert again.snapshot() == cfg.snapshot()

    def test_snapshot_contains_space_descriptor(self):
        cfg = parse_config_text(MINIMAL + "gaussian.classes = 3\ngaussian.sectors = 4\n")
        snap = cfg.snapshot()
        assert "space.class = categorical:3" in snap
        assert "space.angle = continuous:" in snap

    def test_snapshot_parse_from_file(self, tmp_path):
        cfg = parse_config_text(MINIMAL)
        path = write_config(tmp_path, cfg.snapshot())
        assert parse_config(path) == cfg

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            parse_config(tmp_path / "none.cfg")


class TestDataDirEnv:
    def test_relative_paths_resolve_against_env(self, fixtures_dir, monkeypatch):
        monkeypatch.setenv("ADASAMPLE_DATA_DIR", str(fixtures_dir))
        cfg = parse_config_text(
            "experiment = m\ngenerator = mnist\n"
            "mnist.images = mini_images.idx\nmnist.labels = mini_labels.idx\n"
        )
        gen, pool, val = cfg.make_generator()
        assert pool.images.shape == (1, 2, 2)

    def test_absolute_paths_ignore_env(self, fixtures_dir, monkeypatch):
        monkeypatch.setenv("ADASAMPLE_DATA_DIR", "/definitely/wrong")
        cfg = parse_config_text(
            "experiment = m\ngenerator = mnist\n"
            f"mnist.images = {fixtures_dir / 'mini_images.idx'}\n"
            f"mnist.labels = {fixtures_dir / 'mini_labels.idx'}\n"
        )
        gen, pool, _ = cfg.make_generator()
        assert pool.images.shape == (1, 2, 2)
