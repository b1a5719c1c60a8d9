import math

import numpy as np
import pytest

from ris_overhead import cli
from ris_overhead.experiment import (
    CSV_HEADER,
    PRESETS,
    ConfigError,
    ExperimentConfig,
    emit_csv,
    format_config,
    load_config,
    parse_config_text,
    read_csv,
    run_experiment,
    summarize_rows,
    summary_path,
    worker_count,
)


def test_defaults_reference_constants():
    c = ExperimentConfig()
    assert c.p_max == pytest.approx(10 ** 1.5)
    assert c.b_max == 100e6
    assert c.n0 == pytest.approx(10 ** -20.4)
    assert c.p_c0 == pytest.approx(10 ** 1.5) and c.p_cn == pytest.approx(1e-2)
    assert (c.mu, c.mu_f, c.b_f) == (1.0, 1.0, 16.0)


def test_parse_units_and_ranges():
    c = parse_config_text("""
        # comment
        p_max_dbm = 30
        b_max_mhz = 20
        t0_us = 0.15   # trailing comment
        p0_mw = 5
        n_list = 10:30:10, 50
        schemes = b, d
        slot_ms = 2
    """)
    assert c.p_max == pytest.approx(1.0)
    assert c.b_max == pytest.approx(20e6)
    assert c.t0 == pytest.approx(0.15e-6) and c.p0 == pytest.approx(5e-3)
    assert c.n_list == (10, 20, 30, 50)
    assert c.schemes == ("b", "d")
    assert c.slot_t == pytest.approx(2e-3)


@pytest.mark.parametrize("text", ["bogus = 1", "trials = 0", "schemes = q", "objective = x",
                                  "n_list =", "no equals sign", "trials = abc", "t0_us = 1e5"])
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_format_round_trip():
    c = load_config(preset="fig4b", overrides={"seed": "7"})
    assert parse_config_text(format_config(c)) == c
    assert c.n_t == 8 and c.t0 == pytest.approx(0.15e-6) and c.seed == 7


def test_all_presets_parse():
    for name in PRESETS:
        load_config(preset=name)


def test_empty_rows_header_only(tmp_path):
    p = tmp_path / "e.csv"
    emit_csv([], p)
    assert p.read_text(encoding="utf-8") == ",".join(CSV_HEADER) + "\n"


def _fake_rows(n, rng):
    rows = []
    for i in range(n):
        rows.append({
            "scheme": "abcd"[i % 4], "protocol": "a", "N": int(rng.integers(1, 300)), "n_t": 1, "n_r": 1,
            "t0_s": 0.8e-6, "p0_w": 2.5e-3, "trial": i, "objective": "rate",
            "value": float(rng.standard_normal() * 1e9), "se_bits_s_hz": float(rng.random() * 30),
            "ee_bits_joule": float(rng.random() * 1e8), "p": float(rng.random()), "p_f": 1 / 3,
            "b": float(rng.random() * 1e8), "b_f": math.nan if i % 7 == 0 else 0.1, "status": "ok",
        })
    return rows


def _same(a, b):
    for k in a:
        x, y = a[k], b[k]
        if isinstance(x, float) and math.isnan(x):
            assert math.isnan(y)
        else:
            assert x == y, k


def test_csv_round_trip_one_row(tmp_path):
    rows = _fake_rows(1, np.random.default_rng(0))
    p = tmp_path / "one.csv"
    emit_csv(rows, p)
    _same(rows[0], read_csv(p)[0])


def test_csv_round_trip_10k(tmp_path):
    rows = _fake_rows(10_000, np.random.default_rng(1))
    p = tmp_path / "many.csv"
    emit_csv(rows, p)
    back = read_csv(p)
    assert len(back) == len(rows)
    for a, b in zip(rows, back):
        _same(a, b)


def test_rank_one_equivalence_row():
    cfg = ExperimentConfig(schemes=("b", "c"), n_list=(1,), trials=1)
    rows = run_experiment(cfg, workers=1)
    assert len(rows) == 2
    assert rows[0]["se_bits_s_hz"] == rows[1]["se_bits_s_hz"]


def test_row_count_and_order():
    cfg = ExperimentConfig(schemes=("d", "a"), n_list=(5, 3), trials=3)
    rows = run_experiment(cfg, workers=1)
    assert len(rows) == 2 * 2 * 3
    keys = [(r["scheme"], r["N"], r["trial"]) for r in rows]
    assert keys[0] == ("d", 3, 0) and keys[-1] == ("a", 5, 2)
    summ = summarize_rows(rows)
    assert len(summ) == 4 and all(s["trials"] == 3 for s in summ)


def test_infeasible_trials_flagged():
    cfg = ExperimentConfig(n_t=8, n_r=8, n_list=(200,), schemes=("a", "d"), trials=2)
    rows = run_experiment(cfg, workers=1)
    status = {r["scheme"]: r["status"] for r in rows}
    assert status == {"a": "ok", "d": "overhead_exceeds_slot"}
    assert all(r["se_bits_s_hz"] == 0.0 for r in rows if r["scheme"] == "d")


def test_deterministic_across_workers(tmp_path):
    cfg = ExperimentConfig(n_list=(4, 16), trials=4, seed=11, objective="ee", m_points=20)
    p1, p2 = tmp_path / "w1.csv", tmp_path / "w3.csv"
    emit_csv(run_experiment(cfg, workers=1), p1)
    emit_csv(run_experiment(cfg, workers=3), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_pareto_rows_have_extra_columns(tmp_path):
    cfg = ExperimentConfig(objective="pareto", schemes=("d",), n_list=(10,), trials=1,
                           alpha_grid=(0.3, 0.7), m_points=10)
    rows = run_experiment(cfg, workers=1)
    assert [r["alpha"] for r in rows] == [0.3, 0.7]
    p = tmp_path / "p.csv"
    emit_csv(rows, p)
    assert p.read_text().splitlines()[0].endswith(",alpha,t")


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("RIS_ALLOC_THREADS", "2")
    assert worker_count(8) == 2
    monkeypatch.setenv("RIS_ALLOC_THREADS", "x")
    with pytest.raises(ConfigError):
        worker_count()


def test_cli_sweep_and_summary(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = cli.main(["rate-sweep", "--schemes", "a,d", "--n-list", "8", "--trials", "2",
                     "--out", str(out), "--workers", "1"])
    assert code == 0
    assert len(read_csv(out)) == 4
    assert len(read_csv(summary_path(out))) == 2


def test_cli_exit_codes(tmp_path, capsys):
    assert cli.main(["rate-sweep", "--set", "nope=1"]) == 1
    assert cli.main(["ee-sweep", "--objective", "rate"]) == 1
    assert cli.main(["rate-sweep", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert cli.main(["rate-sweep", "--n-list", "2", "--trials", "1", "--workers", "1",
                     "--out", str(tmp_path / "no" / "dir.csv")]) == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["frobnicate"])
    assert e.value.code == 1


def test_cli_show_config(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("n_t = 2\nprotocol = b\n")
    assert cli.main(["show-config", "--config", str(cfg), "--t0-us", "0.15"]) == 0
    text = capsys.readouterr().out
    c = parse_config_text(text)
    assert c.n_t == 2 and c.protocol == "b" and c.t0 == pytest.approx(0.15e-6)
