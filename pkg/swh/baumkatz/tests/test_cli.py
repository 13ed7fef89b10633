# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import os

from click.testing import CliRunner
import pytest

from swh.baumkatz import montecarlo
from swh.baumkatz.cli import baumkatz as baumkatz_cli


@pytest.fixture(autouse=True)
def no_config_env(monkeypatch):
    monkeypatch.delenv("SWH_CONFIG_FILENAME", raising=False)


def invoke(*args):
    runner = CliRunner()
    return runner.invoke(baumkatz_cli, list(args), catch_exceptions=False)


def read_output(out, name):
    with open(os.path.join(str(out), name), "rb") as f:
        return f.read()


def test_cli_help():
    result = invoke("--help")
    assert result.exit_code == 0
    for command in (
        "exponent",
        "envelope",
        "spec",
        "moments",
        "oracle",
        "simulate",
        "bounds-check",
        "series",
        "statement1",
        "indep-proof",
    ):
        assert command in result.output


def test_cli_exponent(write_config, read_csv):
    conffile = write_config(
        {
            "rows": [
                {"regime": "MDS", "r": 1, "p": 3},
                {"regime": "Arbitrary", "r": 0.5, "p": 1.5},
                {"regime": "IndependentCentered", "r": 1, "p": 2},
            ]
        }
    )
    result = invoke("-C", conffile, "exponent")
    assert result.exit_code == 0, result.output
    assert "MDS,1,3,4\n" in result.output
    assert "Arbitrary,0.5,1.5,2\n" in result.output
    assert "IndependentCentered,1,2,2\n" in result.output

    meta, rows = read_csv(result.output)
    assert meta["seed"] == "none"
    assert len(meta["config_hash"]) == 64
    assert "swh.baumkatz" in meta["version"]
    assert len(rows) == 3


@pytest.mark.parametrize(
    "config,reason",
    [
        ({"r": 1, "p": 0.5}, "validation"),
        ({"r": 2.5, "p": 3}, "validation"),
        (
            {"regime": "NegativelyAssociated", "r": 1, "p": 1.5},
            "unsupported-combination",
        ),
        ({"regime": "Arbitrary", "r": 1, "p": 1}, "unsupported-combination"),
        ({"regime": "Chaotic", "r": 1, "p": 1}, "validation"),
        ({"r": 1, "p": 1, "colour": "blue"}, "configuration"),
    ],
)
def test_cli_exponent_invalid(write_config, config, reason):
    result = invoke("-C", write_config(config), "exponent")
    assert result.exit_code == 2
    assert f"error: {reason}:" in result.output


def test_cli_config_not_a_mapping(tmp_path):
    conffile = tmp_path / "list.yml"
    conffile.write_text("- 1\n- 2\n")
    result = invoke("-C", str(conffile), "exponent")
    assert result.exit_code == 2
    assert "error: configuration:" in result.output
    assert "does not hold a mapping" in result.output


def test_cli_config_from_environment(swh_config, read_csv):
    result = invoke("spec")
    assert result.exit_code == 0, result.output
    meta, _ = read_csv(result.output)
    assert meta["seed"] == "42"
    assert meta["horizon"] == "64"


def test_cli_spec(write_config, swh_baumkatz_config, read_csv):
    result = invoke("-C", write_config(swh_baumkatz_config), "spec")
    assert result.exit_code == 0, result.output
    meta, rows = read_csv(result.output)
    assert meta["kind"] == "CounterexampleIndependent"
    assert meta["k0"] == "1"
    assert float(meta["moment"]) == pytest.approx(2)
    # 4^3 <= 64 < 4^4
    assert [row["k"] for row in rows] == ["1", "2", "3", "4"]
    assert rows[0]["active"] == "false"
    assert all(row["active"] == "true" for row in rows[1:])
    assert all(row["certified"] == "true" for row in rows[1:])


def test_cli_spec_rejects_baseline(write_config, rademacher_config):
    result = invoke("-C", write_config(rademacher_config), "spec")
    assert result.exit_code == 2
    assert "is not a counterexample" in result.output


def test_cli_moments_mds(write_config, read_csv):
    conffile = write_config(
        {
            "regime": "MDS",
            "r": 1,
            "p": 3,
            "horizon": 256,
            "process": {"kind": "CounterexampleMDS"},
        }
    )
    result = invoke("-C", conffile, "moments")
    assert result.exit_code == 0, result.output
    meta, rows = read_csv(result.output)
    assert meta["q_exp"] == "4"
    assert [row["k"] for row in rows] == ["3", "4", "5"]
    for row in rows:
        assert float(row["moment"]) == pytest.approx(1)


def test_cli_envelope_convex(write_config, read_csv):
    conffile = write_config(
        {
            "construction": "convex",
            "horizon": 60,
            "f": {"log_tower": {"m": 1, "eps": 1}},
        }
    )
    result = invoke("-C", conffile, "envelope")
    assert result.exit_code == 0, result.output
    meta, rows = read_csv(result.output)
    assert meta["construction"] == "convex"
    assert meta["report.slopes_non_decreasing"] == "true"
    assert len(rows) == 60


def test_cli_envelope_infeasible_schedule(write_config):
    conffile = write_config({"construction": "regularize", "horizon": 50})
    result = invoke("-C", conffile, "envelope")
    assert result.exit_code == 3
    assert "error: infeasible-schedule:" in result.output


def test_cli_envelope_unknown_construction(write_config):
    conffile = write_config({"construction": "bend", "horizon": 50})
    result = invoke("-C", conffile, "envelope")
    assert result.exit_code == 2


def test_cli_oracle_rademacher(write_config, rademacher_config, read_csv):
    rademacher_config["oracle"] = {"n_grid": [16, 64], "t_grid": [4, 8]}
    result = invoke("-C", write_config(rademacher_config), "oracle")
    assert result.exit_code == 0, result.output
    _, rows = read_csv(result.output)
    assert [(row["n"], row["t"]) for row in rows] == [
        ("16", "4"),
        ("16", "8"),
        ("64", "4"),
        ("64", "8"),
    ]
    # |S_16| > 4 means at least 11 of the 16 signs agree
    assert float(rows[0]["p_hat"]) == pytest.approx(2 * 6885 / 2**16)
    assert float(rows[2]["p_hat"]) > float(rows[3]["p_hat"])


def test_cli_oracle_enumeration_limit(write_config, rademacher_config):
    rademacher_config["oracle"] = {"statistic": "M", "n_grid": [20]}
    result = invoke("-C", write_config(rademacher_config), "oracle")
    assert result.exit_code == 4
    assert "error: enumeration-limit-exceeded:" in result.output


def test_cli_simulate_requires_seed(write_config, swh_baumkatz_config):
    del swh_baumkatz_config["seed"]
    result = invoke("-C", write_config(swh_baumkatz_config), "simulate")
    assert result.exit_code == 2
    assert "seed" in result.output


def test_cli_simulate_beyond_horizon(write_config, swh_baumkatz_config):
    swh_baumkatz_config["simulate"]["n_grid"] = [128]
    result = invoke("-C", write_config(swh_baumkatz_config), "simulate")
    assert result.exit_code == 4
    assert "error: horizon-exceeded:" in result.output


def test_cli_simulate_unsorted_grid(write_config, swh_baumkatz_config):
    swh_baumkatz_config["simulate"]["n_grid"] = [32, 16]
    result = invoke("-C", write_config(swh_baumkatz_config), "simulate")
    assert result.exit_code == 2


def test_cli_simulate_identical_across_threads(
    tmp_path, write_config, swh_baumkatz_config, read_csv, mocker
):
    spy = mocker.spy(montecarlo, "estimate_tails")
    swh_baumkatz_config["simulate"] = {
        "trials": 20000,
        "n_grid": [16, 64],
        "statistic": "M",
    }
    conffile = write_config(swh_baumkatz_config)
    outputs = []
    for threads in (1, 2, 8):
        out = tmp_path / f"threads-{threads}"
        result = invoke(
            "-C", conffile, "--out", str(out), "--threads", str(threads), "simulate"
        )
        assert result.exit_code == 0, result.output
        outputs.append(read_output(out, "simulate.csv"))
        # the worker count reaches the estimator
        assert spy.call_args.args[-1] == threads
    assert outputs[0] == outputs[1] == outputs[2]

    meta, rows = read_csv(outputs[0].decode())
    assert meta["seed"] == "42"
    assert [row["n"] for row in rows] == ["16", "64"]
    assert all(row["trials"] == "20000" for row in rows)


def test_cli_simulate_seed_override(write_config, swh_baumkatz_config):
    conffile = write_config(swh_baumkatz_config)
    first = invoke("-C", conffile, "simulate")
    second = invoke("-C", conffile, "--seed", "43", "simulate")
    again = invoke("-C", conffile, "--seed", "43", "simulate")
    assert first.exit_code == second.exit_code == 0
    assert first.output != second.output
    assert second.output == again.output
    assert "# seed=43\n" in second.output


def test_cli_bounds_check(tmp_path, write_config, rademacher_config, read_csv):
    rademacher_config["bounds-check"] = {"n_grid": [32], "trials": 2000}
    conffile = write_config(rademacher_config)
    result = invoke("-C", conffile, "-o", str(tmp_path), "bounds-check")
    assert result.exit_code == 0, result.output
    meta, rows = read_csv(read_output(tmp_path, "bounds-check.csv").decode())
    assert meta["flags"] == "0"
    assert len(rows) == 20
    assert all(row["doob_violated"] == "false" for row in rows)
    assert all(row["shao_violated"] == "false" for row in rows)


def test_cli_bounds_check_rejects_dependent(write_config):
    conffile = write_config(
        {
            "regime": "MDS",
            "r": 1,
            "p": 3,
            "seed": 1,
            "horizon": 64,
            "process": {"kind": "CounterexampleMDS"},
        }
    )
    result = invoke("-C", conffile, "bounds-check")
    assert result.exit_code == 2
    assert "independent" in result.output


def test_cli_bounds_check_rejects_uncentered(write_config):
    conffile = write_config(
        {
            "r": 1,
            "p": 2,
            "seed": 1,
            "horizon": 16,
            "process": {
                "kind": "IIDDiscrete",
                "atoms": [1],
                "probs": [1],
                "require_centered": False,
            },
        }
    )
    result = invoke("-C", conffile, "bounds-check")
    assert result.exit_code == 2
    assert "centered" in result.output


def test_cli_bounds_check_invalid_number(write_config, rademacher_config):
    rademacher_config["bounds-check"] = {"n_grid": [32], "a_factor": "x"}
    result = invoke("-C", write_config(rademacher_config), "bounds-check")
    assert result.exit_code == 2
    assert "error: configuration: a_factor must be a number" in result.output


@pytest.mark.parametrize(
    "section,key,value",
    [
        ("simulate", "n_grid", ["16"]),
        ("series", "target", "none"),
        ("statement1", "anchors", 4),
    ],
)
def test_cli_invalid_values_are_configuration_errors(
    write_config, rademacher_config, section, key, value
):
    rademacher_config[section] = {key: value}
    result = invoke("-C", write_config(rademacher_config), section)
    assert result.exit_code == 2, result.output
    assert f"error: configuration: {key} must be" in result.output


def test_cli_series(tmp_path, write_config, read_csv):
    conffile = write_config(
        {
            "r": 1,
            "p": 1,
            "horizon": 64,
            "f": {"log_tower": {"m": 1, "eps": 1}},
            "series": {
                "n_grid": [4, 8, 16, 32, 64],
                "K": 50,
                "K_tail": 100,
                "target": 0.01,
                "window": 4,
            },
        }
    )
    result = invoke("-C", conffile, "--out", str(tmp_path), "series")
    assert result.exit_code == 0, result.output

    meta, rows = read_csv(read_output(tmp_path, "ledger.csv").decode())
    assert "label" in meta
    assert [row["n"] for row in rows] == ["4", "8", "16", "32", "64"]

    meta, rows = read_csv(read_output(tmp_path, "certificate.csv").decode())
    assert meta["k0"] == "1"
    assert float(meta["tail_bound"]) > 0
    assert [row["k"] for row in rows][0] == "2"
    assert rows[-1]["k"] == "50"
    partial = [float(row["partial_sum"]) for row in rows]
    assert partial == sorted(partial)
    assert float(meta["total"]) == pytest.approx(partial[-1])


def test_cli_series_baseline_has_no_certificate(
    tmp_path, write_config, rademacher_config
):
    rademacher_config["series"] = {"n_grid": [8, 16]}
    conffile = write_config(rademacher_config)
    result = invoke("-C", conffile, "-o", str(tmp_path), "series")
    assert result.exit_code == 0, result.output
    assert os.path.exists(tmp_path / "ledger.csv")
    assert not os.path.exists(tmp_path / "certificate.csv")


def test_cli_statement1_dyadic(write_config, swh_baumkatz_config, read_csv):
    swh_baumkatz_config["statement1"] = {"n_dyadic": 5, "trials": 1000}
    result = invoke("-C", write_config(swh_baumkatz_config), "statement1")
    assert result.exit_code == 0, result.output
    _, rows = read_csv(result.output)
    assert [row["n"] for row in rows] == ["1", "2", "4", "8", "16", "32"]


def test_cli_statement1_rate(write_config, rademacher_config, read_csv):
    rademacher_config["statement1"] = {
        "anchors": [1, 4, 16],
        "window": 64,
        "trials": 1000,
    }
    result = invoke("-C", write_config(rademacher_config), "statement1")
    assert result.exit_code == 0, result.output
    _, rows = read_csv(result.output)
    assert [row["anchor"] for row in rows] == ["1", "4", "16"]
    hits = [int(row["hits"]) for row in rows]
    assert hits == sorted(hits, reverse=True)
    assert all(row["window"] == "64" for row in rows)


def test_cli_statement1_needs_anchors(write_config, rademacher_config):
    rademacher_config["statement1"] = {"window": 64, "trials": 10}
    result = invoke("-C", write_config(rademacher_config), "statement1")
    assert result.exit_code == 2
    assert "anchors" in result.output


def test_cli_indep_proof(write_config, rademacher_config, read_csv):
    rademacher_config["indep-proof"] = {"n_grid": [16, 64]}
    result = invoke("-C", write_config(rademacher_config), "indep-proof")
    assert result.exit_code == 0, result.output
    _, rows = read_csv(result.output)
    assert [row["n"] for row in rows] == ["16", "64"]
    # a = n / 16 never falls below the unit atoms
    assert [row["p_max"] for row in rows] == ["0", "0"]
    assert [row["B_n"] for row in rows] == ["16", "64"]
    assert float(rows[1]["bound"]) < float(rows[0]["bound"])
