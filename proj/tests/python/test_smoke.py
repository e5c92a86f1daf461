import math

import numpy as np
import pytest

import tmeval
from tmeval.adapters import ExportConfig, export_keyword_embeddings, export_topic_model


def test_scalar_functions():
    assert tmeval.t_sf(0.0, 5.0) == 0.5
    assert tmeval.t_sf(1.0, 1.0) == pytest.approx(0.25, abs=1e-15)
    assert tmeval.format_p_value(3e-16) == "<0.0001"
    assert tmeval.format_p_value(0.0450) == "0.0450"
    assert tmeval.npmi_from_counts(4, 2, 2, 2) == pytest.approx(1.0, abs=1e-6)
    assert tmeval.npmi_from_counts(4, 2, 2, 1) == pytest.approx(0.0, abs=1e-6)
    per_topic, avg = tmeval.uniqueness([["a", "b"], ["a", "c"]], 2)
    assert per_topic == [0.75, 0.75] and avg == 0.75
    assert tmeval.diversity([["a", "b"], ["a", "c"]], 2) == 0.75


def test_design_and_ols():
    d = tmeval.build_design(["A", "A", "B", "B"])
    assert d["columns"] == ["Intercept", "A"]
    assert d["reference"] == "B"
    fit = tmeval.ols_fit(d["values"], np.array([0.2, 0.2, 0.4, 0.4]))
    assert fit["coefficients"] == pytest.approx([0.3, -0.1], abs=1e-15)
    assert fit["rank"] == 2


def test_errors_are_typed():
    with pytest.raises(tmeval.InvariantError):
        tmeval.t_sf(1.0, 0.0)
    with pytest.raises(tmeval.Error):
        tmeval.load_bundle("/nonexistent/manifest.json")


def test_synth_effects_roundtrip(tmp_path):
    manifest = tmeval.synth(
        tmp_path / "bundle", 2000, 3, [("A", 0.5), ("B", 0.5)],
        effects={("A", 0): 0.05, ("A", 1): -0.05}, seed=4,
    )
    report = tmeval.validate_bundle(manifest)
    assert report["ok"], report["errors"]
    b = tmeval.load_bundle(manifest)
    assert b["theta"].shape == (2000, 3)
    assert set(b["covariates"]["group"]) == {"A", "B"}

    rows, warnings = tmeval.effects(manifest, "group", n_bootstrap=40, seed=7, jobs=2)
    assert warnings == []
    cell = next(r for r in rows if r["topic_index"] == 0 and r["term"] == "A")
    assert cell["estimate"] == pytest.approx(0.025, abs=0.01)  # half the shift with two categories
    ref = [r for r in rows if r["implied_reference"]]
    assert len(ref) == 3 and all(r["term"] == "B" for r in ref)
    again, _ = tmeval.effects(manifest, "group", n_bootstrap=40, seed=7, jobs=1)
    assert again == rows


def test_run_cli(tmp_path):
    code, out, err = tmeval.run_cli(["synth", "--n-docs", "100", "--out", str(tmp_path), "--tag", "x"])
    assert code == 0, err
    assert "100 docs" in out
    code, _, err = tmeval.run_cli(["effects", "--bogus"])
    assert code == 2 and "Usage" in err


class ToyModel:
    """Stands in for a fitted model: 3 topics over 20 documents."""

    def __init__(self):
        rng = np.random.default_rng(0)
        self._theta = rng.dirichlet([1.0, 1.0, 1.0], size=20)

    def get_topics(self):
        return {
            -1: [("noise", 0.1)],
            0: [("apple", 0.5), ("pear", 0.3)],
            1: [("car", 0.6), ("road", 0.2)],
            2: [("apple", 0.4), ("tree", 0.4)],
        }

    def approximate_distribution(self, documents):
        assert len(documents) == 20
        return self._theta, None


class ToyEncoder:
    def encode(self, words, batch_size=32):
        return np.array([[1.0 + len(w), float(sum(map(ord, w)) % 7), 1.0] for w in words])


def test_adapter_exports_valid_bundle(tmp_path):
    config = ExportConfig(tmp_path / "toy", top_k_keywords=2)
    docs = [f"text {i}" for i in range(20)]
    groups = ["x" if i % 2 else "y" for i in range(20)]
    manifest = export_topic_model(ToyModel(), docs, config, model_id="toy", covariates={"group": groups})
    report = tmeval.validate_bundle(manifest)
    assert report["ok"], report["errors"]
    assert tmeval.load_bundle(manifest)["topic_indices"] == [0, 1, 2]

    path = export_keyword_embeddings([tmp_path / "toy" / "topics.csv"], ToyEncoder(), config)
    lines = path.read_text().splitlines()
    assert len(lines) == 1 + 5  # apple appears in two topics but is embedded once
    rows, _ = tmeval.effects(manifest, "group", n_bootstrap=10, min_feasible=2)
    assert all(math.isfinite(r["estimate"]) for r in rows)


def test_adapter_rejects_model_without_distribution(tmp_path):
    class NoDist:
        def get_topics(self):
            return {0: [("a", 1.0)]}

    with pytest.raises(TypeError, match="approximate_distribution"):
        export_topic_model(NoDist(), ["d"], ExportConfig(tmp_path), model_id="m")
