import io

from gramgrow.cli import EXIT_OK, Session, cmd_eval, main, run_repl


def fresh_session():
    out = io.StringIO()
    session = Session(out=out)
    session.load_bundle("demo")
    return session, out


def run_script(session, lines):
    return run_repl(session, lines)


def test_flags_table_six_lines():
    session, out = fresh_session()
    run_script(session, ["flags", "quit"])
    lines = out.getvalue().splitlines()
    start = lines.index("Current flag settings:")
    table = lines[start + 2 : start + 8]
    names = [row.split(":")[0].strip() for row in table]
    assert names == ["Learning", "Type checking", "LP rules", "HFC", "SBL", "Training"]


def test_learning_trace_lines():
    session, out = fresh_session()
    run_script(session, ["Sam chases the happy cat", "quit"])
    text = out.getvalue()
    assert "1 rule(s) acquired." in text
    assert "1 parse(s)" in text
    acquired = text.index("1 rule(s) acquired.")
    parses = text.index("1 parse(s)")
    assert acquired < parses


def test_parses_display_nested():
    session, out = fresh_session()
    run_script(session, ["Sam chases the happy cat", "!*parses*", "quit"])
    text = out.getvalue()
    assert '(("S1" ((|Sam|)' in text
    assert "(|cat|)" in text


def test_zero_parse_trace():
    session, out = fresh_session()
    run_script(session, ["Sam chases happy the cat", "quit"])
    text = out.getvalue()
    assert "0 parse(s)" in text
    assert "rule(s) acquired" not in text


def test_unknown_command_prints_usage():
    session, out = fresh_session()
    run_script(session, ["load-grammar", "quit"])
    assert "commands:" in out.getvalue()


def test_resource_error_keeps_session_alive():
    session, out = fresh_session()
    run_script(session, ["load-grammar /nonexistent/file", "Sam chases the cat", "quit"])
    text = out.getvalue()
    assert "error:" in text
    assert "1 parse(s)" in text


def test_flag_toggle_round_trip():
    session, out = fresh_session()
    run_script(
        session,
        [
            "Sam chases the happy cat",
            "set lp off",
            "set lp on",
            "quit",
        ],
    )
    first = out.getvalue()
    session2, out2 = fresh_session()
    run_script(session2, ["Sam chases the happy cat", "quit"])
    assert out2.getvalue() in first


def test_repl_byte_identical_across_runs():
    script = [
        "flags",
        "Sam chases the happy cat",
        "!*parses*",
        "Sam chases the cat down the road",
        "quit",
    ]
    outputs = []
    for _ in range(2):
        session, out = fresh_session()
        run_script(session, script)
        outputs.append(out.getvalue())
    assert outputs[0] == outputs[1]


def test_set_sbl_requires_triples():
    session, out = fresh_session()
    run_script(session, ["set sbl on", "quit"])
    assert "error:" in out.getvalue()


# -- eval -----------------------------------------------------------------------


def test_cmd_eval_basics(tmp_path):
    session, out = fresh_session()
    test_file = tmp_path / "test.corpus"
    test_file.write_text("Sam chases the cat\nSam chases the happy cat\n")
    report = cmd_eval(session, test_path=str(test_file))
    assert report.undergen_fraction == 0.5


def test_cmd_eval_empty_test_is_undefined(tmp_path):
    session, _ = fresh_session()
    test_file = tmp_path / "empty.corpus"
    test_file.write_text("")
    report = cmd_eval(session, test_path=str(test_file))
    assert report.undergen_fraction is None
    assert any(line.startswith("undergen\tundefined") for line in report.lines())


def test_cmd_eval_single_parseable_line(tmp_path):
    session, _ = fresh_session()
    test_file = tmp_path / "one.corpus"
    test_file.write_text("Sam chases the cat\n")
    report = cmd_eval(session, test_path=str(test_file))
    assert report.undergen_fraction == 1.0


def test_cmd_eval_reports_byte_identical(tmp_path):
    test_file = tmp_path / "test.corpus"
    test_file.write_text("Sam chases the cat\n")
    texts = []
    for run in range(2):
        session, _ = fresh_session()
        prefix = str(tmp_path / ("run%d" % run))
        cmd_eval(session, test_path=str(test_file), random_count=20, random_length=4,
                 seed=99, out_prefix=prefix)
        texts.append((open(prefix + ".tsv").read(), open(prefix + ".txt").read()))
    assert texts[0] == texts[1]


def test_main_eval_exit_codes(tmp_path):
    test_file = tmp_path / "test.corpus"
    test_file.write_text("Sam chases the cat\n")
    code = main(
        ["eval", "--bundle", "demo", "--test", str(test_file), "--out", str(tmp_path / "r")]
    )
    assert code == EXIT_OK
    code = main(["eval", "--bundle", "demo", "--test", str(tmp_path / "missing.corpus")])
    assert code == 2


def test_main_repl_script(tmp_path, capsys):
    script = tmp_path / "session.txt"
    script.write_text("flags\nquit\n")
    code = main(["repl", "--bundle", "demo", "--script", str(script)])
    assert code == EXIT_OK
    assert "Current flag settings:" in capsys.readouterr().out


def test_gg_seed_env_override(monkeypatch):
    monkeypatch.setenv("GG_SEED", "777")
    session = Session()
    assert session.seed == 777
    session2 = Session(seed=5)
    assert session2.seed == 5


def test_trace_logs_edges(capsys):
    session, out = fresh_session()
    session.trace = True
    run_script(session, ["Sam chases the cat", "quit"])
    err = capsys.readouterr().err
    assert "Edge(" in err


def test_full_learning_session_matches_trace_shape(tmp_path):
    pretrain = tmp_path / "pretrain.corpus"
    pretrain.write_text(
        "Sam chases the cat\nThe cat chases Sam\n"
        "The cat down the road chases Sam\nSam down the road chases the happy cat\n"
    )
    triples = tmp_path / "empty.triples"
    triples.write_text("params delta 0.001 omega 0.35\n")
    session, out = fresh_session()
    run_script(
        session,
        [
            "load-triples %s" % triples,
            "train-corpus %s" % pretrain,
            "set hfc off",
            "Sam chases the happy cat",
            "set learning off",
            "set training on",
            "Sam chases the happy happy cat",
            "refine-grammar",
            "quit",
        ],
    )
    text = out.getvalue()
    assert "1 rule(s) acquired." in text
    assert "Refining and deleting rules ..." in text
    assert "Refining 4 rules encoded in" in text
    assert "rule is N1 -> Adj N1" in text
