import json

import numpy as np
import pytest

from fracsync.cli import main
from fracsync.csvio import dumps, loads, read_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_t_system(tmp_path, capsys):
    path = tmp_path / "t.csv"
    code, _, _ = run(
        capsys, "simulate", "--system", "t", "--alpha", "0.9,0.5,0.6", "--x0", "0.01,0.01,0.01",
        "--h", "0.01", "--t-end", "100", "--out", str(path),
    )
    assert code == 0
    table = read_csv(path.open())
    assert table.header == ["t", "x", "y", "z"]
    assert table.data.shape == (10001, 4)
    assert np.max(np.abs(table.data[:, 1:])) < 1e3
    meta = table.metadata()
    assert meta["status"] == "completed"
    assert meta["config"]["command"] == "simulate"
    assert meta["config"]["options"]["alpha"] == "0.9,0.5,0.6"


def test_simulate_rossler_first_step(capsys):
    code, out, _ = run(capsys, "simulate", "--system", "rossler", "--alpha", "1,1,1", "--x0", "0,0,0", "--h", "0.01", "--t-end", "1")
    assert code == 0
    table = loads(out)
    # derivative at the origin is (0, 0, 0.2); one step of h=0.01 moves z by ~0.002
    dz = table.data[1, 3] / 0.01
    assert dz == pytest.approx(0.2, rel=5e-2)
    assert abs(table.data[1, 1]) < 1e-4 and abs(table.data[1, 2]) < 1e-4


def test_simulate_missing_system(capsys):
    code, _, err = run(capsys, "simulate", "--alpha", "0.9,0.5,0.6")
    assert code == 1
    assert "usage" in err


def test_simulate_bad_values(capsys):
    assert run(capsys, "simulate", "--system", "t", "--alpha", "1.5,0.5,0.5")[0] == 1
    assert run(capsys, "simulate", "--system", "lorenz")[0] == 1
    assert run(capsys, "simulate", "--system", "t", "--h", "-1")[0] == 1


def test_simulate_divergence_is_in_band(capsys):
    code, out, _ = run(capsys, "simulate", "--system", "t", "--x0", "1e5,1e5,1e5", "--t-end", "1", "--divergence-threshold", "1e6")
    assert code == 0
    assert loads(out).metadata()["status"] == "diverged"


def test_csv_roundtrip_byte_identical(capsys):
    _, out, _ = run(capsys, "simulate", "--system", "rossler", "--t-end", "2", "--h", "0.01")
    assert dumps(loads(out)) == out


def test_rerun_from_metadata_reproduces(capsys):
    _, out, _ = run(capsys, "simulate", "--system", "t", "--t-end", "1", "--h", "0.02", "--param", "c1=28")
    opts = loads(out).metadata()["config"]["options"]
    argv = ["simulate", "--system", opts["system"], "--alpha", opts["alpha"], "--x0", opts["x0"],
            "--h", str(opts["h"]), "--t-end", str(opts["t_end"])]
    for p in opts["param"]:
        argv += ["--param", p]
    _, again, _ = run(capsys, *argv)
    assert loads(again).data.tobytes() == loads(out).data.tobytes()


def test_couple_stabilized(tmp_path, capsys):
    path = tmp_path / "c.csv"
    code, out, _ = run(capsys, "couple", "--scenario", "tt-sync", "--gains", "stabilized", "--k", "1,1,1",
                       "--h", "0.005", "--t-end", "20", "--out", str(path))
    assert code == 0
    table = read_csv(path.open())
    assert table.header == ["t", "xd", "yd", "zd", "xr", "yr", "zr", "e1", "e2", "e3"]
    np.testing.assert_array_equal(table.column("e1"), table.column("xr") - table.column("xd"))
    meta = table.metadata()
    assert meta["status"] == "completed"
    assert float(meta["tail_sup"]) < 0.1
    assert "verdict=" in out


def test_couple_paper_gains_grow(capsys):
    code, out, _ = run(capsys, "couple", "--scenario", "tt-sync", "--gains", "paper", "--t-end", "2")
    assert code == 0
    meta = loads(out).metadata()
    assert meta["verdict"] in ("diverged", "bounded-nonzero")
    assert meta["tail_growing"] == "true"


def test_couple_zero_error(capsys):
    code, out, _ = run(capsys, "couple", "--scenario", "rt-sync", "--gains", "paper",
                       "--drive-x0", "0.3,-1.2,4", "--response-x0", "0.3,-1.2,4", "--t-end", "2")
    assert code == 0
    table = loads(out)
    assert np.max(np.abs(table.data[:, 7:])) <= 1e-12


def test_stability_lambda(capsys):
    code, out, _ = run(capsys, "stability", "--lambda", "2.1,30,0.6", "--alpha", "0.9,0.5,0.6")
    assert code == 0
    assert "verdicts: unstable,unstable,unstable" in out
    assert "overall: unstable" in out

    code, out, _ = run(capsys, "stability", "--lambda", "-1,-1,-1", "--alpha", "0.5,0.5,0.5")
    assert code == 0 and "overall: stable" in out

    code, out, _ = run(capsys, "stability", "--lambda", "0", "--alpha", "0.9")
    assert code == 0 and "marginal" in out


def test_stability_json_and_scenario(capsys):
    code, out, _ = run(capsys, "stability", "--scenario", "rt-anti", "--gains", "paper", "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["overall"] == "unstable"
    assert [c["lambda"] for c in rep["components"]] == [2.1, 0.2, 0.6]


def test_stability_length_mismatch(capsys):
    assert run(capsys, "stability", "--lambda", "1,2", "--alpha", "0.5")[0] == 1


def test_cipher_tables(tmp_path, capsys):
    keys = tmp_path / "residues.txt"
    keys.write_text("\n".join(map(str, (18, 18, 29, 29, 20, 20, 21, 6, 6, 30))) + "\n")
    code, out, _ = run(capsys, "cipher", "encrypt", "--codec", "paper36", "--keys-file", str(keys), "--message", "Hello Oscar")
    assert code == 0 and out.strip() == "0,33,15,15,9,9,14,19,17,22"
    code, out, _ = run(capsys, "cipher", "decrypt", "--codec", "paper36", "--keys-file", str(keys),
                       "--ciphertext", "0,33,15,15,9,9,14,19,17,22")
    assert code == 0 and out.strip() == "hellooscar"


def test_cipher_seed_deterministic(capsys):
    a = run(capsys, "cipher", "encrypt", "--seed", "42", "--message", "m")
    b = run(capsys, "cipher", "encrypt", "--seed", "42", "--message", "m")
    assert a[0] == 0 and a[1] == b[1]
    code, out, _ = run(capsys, "cipher", "decrypt", "--seed", "42", "--ciphertext", a[1].strip())
    assert out.strip() == "m"


def test_cipher_key_exhaustion(tmp_path, capsys):
    keys = tmp_path / "k.txt"
    keys.write_text("1\n2\n")
    code, _, err = run(capsys, "cipher", "encrypt", "--keys-file", str(keys), "--message", "abc")
    assert code == 1
    assert "need 3 keys" in err


def test_cipher_requires_one_key_source(capsys):
    assert run(capsys, "cipher", "encrypt", "--message", "abc")[0] == 1
    assert run(capsys, "cipher", "encrypt", "--seed", "1", "--keys-file", "x", "--message", "abc")[0] == 1


def test_cipher_keystream_from_trajectory(tmp_path, capsys):
    path = tmp_path / "sync.csv"
    run(capsys, "couple", "--scenario", "tt-sync", "--gains", "stabilized", "--drive-x0", "0.01,0.01,0.01",
        "--response-x0", "0.01,0.01,0.01", "--t-end", "7", "--out", str(path))
    code, out, _ = run(capsys, "cipher", "encrypt", "--keystream-from", f"{path},zd,1300", "--message", "Hello Oscar")
    assert code == 0
    code, plain, _ = run(capsys, "cipher", "decrypt", "--keystream-from", f"{path},zr,1300", "--ciphertext", out.strip())
    assert code == 0 and plain.strip() == "hellooscar"
