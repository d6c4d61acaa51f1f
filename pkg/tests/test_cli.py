import json
from pathlib import Path

import numpy as np
import pytest

from evoqas.architecture import ArchitectureSpec, Entangler, HLayer, Rotation, decode, init_genotype
from evoqas.cli import main
from evoqas.information import FisherSample, eigenspectrum, normalize_fisher, sample_fishers
from evoqas.model import QuantumModel
from evoqas.runs import RunConfig, ed_sweep, fisher_spectrum, run_evolve
from evoqas.simulator import CircuitSpec
from oracles import identity_fisher_ed

ARCH = ArchitectureSpec(HLayer.WITHOUT_H, Rotation.RY, ((Entangler.CHAIN, Rotation.RY),
                                                         (Entangler.RING, Rotation.RY)))


def write_config(path, **overrides):
    data = {
        "evolution": {"population_size": 4, "num_parents": 2, "num_generations": 2, "n_qubits": 3,
                      "ed_params": {"num_theta_samples": 4, "k": 8}, "master_seed": 5},
        "n_list": [500, 1000],
        "qubit_list": [3, 4],
        "model": {"architecture": ARCH.to_dict()},
    }
    data.update(overrides)
    path.write_text(json.dumps(data))
    return str(path)


def files(directory):
    return {p.name: p.read_bytes() for p in sorted(Path(directory).iterdir())}


class StubModel:
    def __init__(self, d):
        self.num_params, self.num_inputs, self.param_bounds = d, 1, (0.0, 1.0)


def stub(matrix_fn):
    def fn(model, theta, k, rng):
        F = matrix_fn(model.num_params)
        return FisherSample(theta, F, float(np.trace(F)))
    return fn


@pytest.mark.parametrize("layers,count", [(0, 6), (1, 36), (2, 216)])
def test_enumerate(layers, count, capsys):
    assert main(["enumerate", "--layers", str(layers)]) == 0
    assert capsys.readouterr().out.strip() == str(count)


def test_config_errors_exit_2(tmp_path, capsys):
    bad = [
        {"unknown": 1},
        {"evolution": {"population_size": 2, "num_parents": 3}},
        {"evolution": {"bogus": 1}},
        {"model": {"architecture": {"encoding_layer": [[1, 1], [1, 0, 0]], "variational_layer": []}}},
    ]
    for i, data in enumerate(bad):
        p = tmp_path / f"bad{i}.json"
        p.write_text(json.dumps(data))
        assert main(["evolve", "--config", str(p), "--out", str(tmp_path / "o")]) == 2
    (tmp_path / "broken.json").write_text("{not json")
    assert main(["evolve", "--config", str(tmp_path / "broken.json")]) == 2
    assert main(["evolve", "--config", str(tmp_path / "missing.json")]) == 2
    assert main(["ed-sweep", "--out", str(tmp_path / "o")]) == 2  # no model given
    assert main(["enumerate", "--layers", "-1"]) == 2


def test_evolve_zero_generations(tmp_path):
    cfg = write_config(tmp_path / "c.json")
    out = tmp_path / "run"
    assert main(["evolve", "--config", cfg, "--out", str(out), "--threads", "1"]) == 0
    assert main(["evolve", "--config", cfg, "--out", str(out), "--threads", "1"]) == 0
    # overriding generations through the config file
    data = json.loads(Path(cfg).read_text())
    data["evolution"]["num_generations"] = 0
    Path(cfg).write_text(json.dumps(data))
    out0 = tmp_path / "run0"
    assert main(["evolve", "--config", cfg, "--out", str(out0)]) == 0
    lines = (out0 / "history.csv").read_text().splitlines()
    assert lines[0] == "generation,best_ed,mean_ed,p25,p75"
    assert len(lines) == 2 and lines[1].startswith("0,")
    assert {"config.json", "history.csv", "best_genotype.json", "best_circuit.txt"} <= set(files(out0))
    circuit = CircuitSpec.from_text((out0 / "best_circuit.txt").read_text())
    assert circuit.n_qubits == 3


def test_evolve_reproducible_across_threads_and_from_config(tmp_path):
    cfg = write_config(tmp_path / "c.json")
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert main(["evolve", "--config", cfg, "--out", str(a), "--threads", "1"]) == 0
    assert main(["evolve", "--config", cfg, "--out", str(b), "--threads", "2"]) == 0
    assert main(["evolve", "--config", str(a / "config.json"), "--out", str(c), "--threads", "3"]) == 0
    assert files(a) == files(b) == files(c)
    assert len((a / "history.csv").read_text().splitlines()) == 4


def test_seed_override_changes_run(tmp_path):
    cfg = write_config(tmp_path / "c.json")
    main(["evolve", "--config", cfg, "--out", str(tmp_path / "a")])
    main(["evolve", "--config", cfg, "--seed", "6", "--out", str(tmp_path / "b")])
    assert json.loads((tmp_path / "b" / "config.json").read_text())["evolution"]["master_seed"] == 6
    assert files(tmp_path / "a")["history.csv"] != files(tmp_path / "b")["history.csv"]


def test_default_output_root(tmp_path, monkeypatch, capsys):
    cfg = write_config(tmp_path / "c.json")
    monkeypatch.setenv("EVOQAS_OUT", str(tmp_path / "root"))
    assert main(["evolve", "--config", cfg]) == 0
    assert (tmp_path / "root" / "evolve-seed5" / "history.csv").exists()
    monkeypatch.delenv("EVOQAS_OUT")
    monkeypatch.chdir(tmp_path)
    assert main(["enumerate"]) == 0
    assert main(["ed-sweep", "--config", cfg, "--n"]) == 0
    assert (tmp_path / "runs" / "ed-sweep-seed5" / "ed_sweep.csv").exists()


def test_ed_sweep_outputs(tmp_path):
    cfg = write_config(tmp_path / "c.json")
    out = tmp_path / "sweep"
    assert main(["ed-sweep", "--config", cfg, "--out", str(out), "--n", "2", "500", "1000"]) == 0
    got = files(out)
    assert set(got) == {"config.json", "ed_sweep.csv", "ed_sweep_mlp_relu.csv", "ed_sweep_mlp_identity.csv"}
    rows = (out / "ed_sweep.csv").read_text().splitlines()
    assert rows[0] == "n,effective_dimension,normalized_ed"
    assert [r.split(",")[0] for r in rows[1:]] == ["500", "1000"]  # n=2 has kappa <= 1
    again = tmp_path / "again"
    assert main(["ed-sweep", "--config", str(out / "config.json"), "--out", str(again), "--threads", "2"]) == 0
    assert files(again) == got


def test_ed_sweep_empty_n_list(tmp_path):
    cfg = write_config(tmp_path / "c.json", n_list=[])
    out = tmp_path / "sweep"
    assert main(["ed-sweep", "--config", cfg, "--out", str(out), "--no-baselines"]) == 0
    assert (out / "ed_sweep.csv").read_bytes() == b"n,effective_dimension,normalized_ed\n"
    assert not (out / "ed_sweep_mlp_relu.csv").exists()


def test_ed_sweep_from_run_and_genotype(tmp_path):
    cfg = write_config(tmp_path / "c.json")
    run = tmp_path / "run"
    main(["evolve", "--config", cfg, "--out", str(run)])
    assert main(["ed-sweep", "--config", cfg, "--run", str(run), "--out", str(tmp_path / "s1")]) == 0
    saved = json.loads((tmp_path / "s1" / "config.json").read_text())
    assert saved["model"]["architecture"] == json.loads((run / "best_architecture.json").read_text())
    assert main(["ed-sweep", "--config", cfg, "--genotype", str(run / "best_genotype.json"),
                 "--out", str(tmp_path / "s2"), "--no-baselines"]) == 0


def test_identity_stub_sweep_closed_form():
    res = ed_sweep(StubModel(5), [1000, 10_000], 1.0, 3, 1, seed=0, fisher_fn=stub(np.eye))
    assert [r.n for r in res] == [1000, 10_000]
    for r in res:
        assert abs(r.value - identity_fisher_ed(5, 1.0, r.n)) < 1e-9


def test_spectrum_outputs(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json")
    out = tmp_path / "spec"
    assert main(["spectrum", "--config", cfg, "--out", str(out)]) == 0
    rows = (out / "spectrum.csv").read_text().splitlines()
    assert rows[0] == "model_id,n_qubits,d,eigenvalue"
    tags = {tuple(r.split(",")[:3]) for r in rows[1:]}
    assert ("qnn", "3", "6") in tags and ("qnn", "4", "8") in tags
    assert {t[0] for t in tags} == {"qnn", "mlp_relu", "mlp_identity"}
    summary = (out / "spectrum_summary.csv").read_text().splitlines()
    assert summary[0] == "model_id,n_qubits,d,frac_below" and len(summary) == 7
    again = tmp_path / "again"
    assert main(["spectrum", "--config", str(out / "config.json"), "--out", str(again), "--threads", "2"]) == 0
    assert files(again) == files(out)


def test_spectrum_matches_direct_eigenspectra():
    model = QuantumModel(decode(ARCH, 4))
    eig = fisher_spectrum(model, 6, 20, seed=2)
    direct = np.concatenate([eigenspectrum(F) for F in normalize_fisher(sample_fishers(model, 6, 20, 2), 8)])
    assert eig.tobytes() == direct.tobytes()
    assert eig.size == 48


def test_zero_fisher_spectrum():
    eig = fisher_spectrum(StubModel(3), 4, 1, seed=0, fisher_fn=stub(lambda d: np.zeros((d, d))))
    np.testing.assert_array_equal(eig, np.zeros(12))


def test_sample_circuit(tmp_path, capsys):
    path = tmp_path / "g.json"
    path.write_text(init_genotype(2, np.random.default_rng(0)).to_json())
    assert main(["sample-circuit", "--genotype", str(path), "--n-qubits", "3", "--argmax"]) == 0
    circuit = CircuitSpec.from_text(capsys.readouterr().out)
    assert circuit.n_qubits == 3 and circuit.num_params == 6
    assert main(["sample-circuit", "--genotype", str(path), "--seed", "4"]) == 0
    first = capsys.readouterr().out
    assert main(["sample-circuit", "--genotype", str(path), "--seed", "4"]) == 0
    assert capsys.readouterr().out == first
    path.write_text('{"encoding_layer": [[1, 2]]}')
    assert main(["sample-circuit", "--genotype", str(path)]) == 2


@pytest.mark.parametrize("n", [1000, 2000])
def test_full_scale_configuration_launches(tmp_path, n):
    # full-scale search settings (P=50, 10 parents, sigma 0.02, 1000 generations); Monte Carlo budgets kept tiny, run stopped after generation 0
    data = {"evolution": {"population_size": 50, "num_parents": 10, "sigma": 0.02,
                          "num_generations": 1000, "ed_params": {"n": n, "num_theta_samples": 2, "k": 4}}}
    cfg = RunConfig.from_dict(data)

    class Stop(Exception):
        pass

    seen = []

    def progress(stats):
        seen.append(stats)
        raise Stop

    with pytest.raises(Stop):
        run_evolve(cfg, tmp_path, progress=progress)
    assert seen[0].generation == 0
    saved = json.loads((tmp_path / "config.json").read_text())
    assert saved["evolution"]["num_generations"] == 1000 and saved["evolution"]["ed_params"]["n"] == n


def test_run_config_round_trip():
    cfg = RunConfig.from_dict({"evolution": {"master_seed": 3}, "n_list": [500], "model": {"architecture": ARCH.to_dict()}})
    assert RunConfig.from_dict(json.loads(cfg.to_json())) == cfg
