import pytest

from xorsmp.cli import main
from xorsmp.harness import RUN_CSV_HEADER, SWEEP_CSV_HEADER


def run_cli(*args):
    return main([str(a) for a in args])


def test_run_writes_csv(tmp_path):
    out = tmp_path / "run.csv"
    rc = run_cli("run", "--n", 16, "--predicate", "eq", "--trials", 5,
                 "--seed", 3, "--strategy", "raw", "--out", out)
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == RUN_CSV_HEADER
    assert len(lines) == 1 + 5 * 6  # auto weights of eq at n=16: 0,1,2,8,15,16


def test_run_stdout(capsys):
    rc = run_cli("run", "--n", "8", "--predicate", "parity", "--trials", "2",
                 "--seed", "0", "--strategy", "raw")
    assert rc == 0
    outp = capsys.readouterr().out
    assert outp.startswith(RUN_CSV_HEADER)


def test_run_byte_identical_repeats(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    da, db = tmp_path / "da", tmp_path / "db"
    for out, dump in ((a, da), (b, db)):
        run_cli("run", "--n", 24, "--predicate", "ham:2", "--trials", 4,
                "--seed", 99, "--strategy", "syndrome", "--out", out,
                "--dump-transcripts", dump)
    assert a.read_bytes() == b.read_bytes()
    files_a = sorted(da.glob("*.txt"))
    files_b = sorted(db.glob("*.txt"))
    assert [f.name for f in files_a] == [f.name for f in files_b]
    for fa, fb in zip(files_a, files_b):
        assert fa.read_bytes() == fb.read_bytes()


def test_weights_flag_and_explicit_list(tmp_path):
    out = tmp_path / "w.csv"
    run_cli("run", "--n", 16, "--predicate", "eq", "--weights", "0,3",
            "--trials", 2, "--seed", 1, "--strategy", "raw", "--out", out)
    rows = out.read_text().splitlines()[1:]
    assert {r.split(",")[5] for r in rows} == {"0", "3"}


def test_predicate_file_flag(tmp_path):
    pred_file = tmp_path / "pred.txt"
    pred_file.write_text("8\n101010101\n")
    out = tmp_path / "f.csv"
    rc = run_cli("run", "--predicate", f"file:{pred_file}", "--n", 8,
                 "--trials", 2, "--seed", 0, "--strategy", "raw", "--out", out)
    assert rc == 0
    assert "values:101010101" in out.read_text()


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "n = 16\npredicate = eq\ntrials = 3\nseed = 5\nstrategy = raw\n"
        "weights = 0,1\n"
    )
    out1 = tmp_path / "c1.csv"
    run_cli("run", "--config", cfg, "--out", out1)
    assert len(out1.read_text().splitlines()) == 1 + 3 * 2
    out2 = tmp_path / "c2.csv"
    run_cli("run", "--config", cfg, "--trials", 1, "--out", out2)
    assert len(out2.read_text().splitlines()) == 1 + 1 * 2


def test_sweep_r_cli(tmp_path):
    out = tmp_path / "sweep.csv"
    rc = run_cli("sweep-r", "--n", 128, "--r-values", "4,8", "--trials", 2,
                 "--seed", 7, "--strategy", "syndrome", "--out", out)
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == SWEEP_CSV_HEADER
    assert len(lines) == 3
    assert lines[1].startswith("4,128,syndrome,2,")


def test_lemma_partition_cli(tmp_path):
    out = tmp_path / "lemma.csv"
    rc = run_cli("lemma-partition", "--k", "16", "--trials", 2000, "--seed", 1,
                 "--out", out)
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "k,c,samples,failures,empirical,bound,stderr"
    assert lines[1].startswith("16,8,2000,")


def test_hd_error_cli(tmp_path):
    out = tmp_path / "hd.csv"
    rc = run_cli("hd-error", "--d", "1", "--epsilon", "0.1", "--trials", 300,
                 "--seed", 2, "--strategy", "syndrome", "--out", out)
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "d,epsilon,strategy,weight,samples,errors,rate,stderr"
    assert len(lines) == 3  # weights d and d+1


def test_replay_cli(tmp_path):
    dump = tmp_path / "dumps"
    run_cli("run", "--n", 16, "--predicate", "eq", "--trials", 2, "--seed", 8,
            "--strategy", "syndrome", "--out", tmp_path / "r.csv",
            "--dump-transcripts", dump)
    out = tmp_path / "replay.csv"
    rc = run_cli("replay", "--dump-transcripts", dump, "--out", out)
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "trial,output,recorded_output,truth,correct,cost_bits,consistent"
    assert all(line.endswith(",1") for line in lines[1:])


def test_replay_requires_dir():
    with pytest.raises(SystemExit):
        run_cli("replay")


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bogus = 1\n")
    with pytest.raises(SystemExit):
        run_cli("run", "--config", cfg, "--n", 8, "--predicate", "eq")
