import subprocess
import sys
import time

import psutil
import pytest

from acirverify.encode_ff import encode_circuit_ff
from acirverify.interp import eval_expression
from acirverify.ir import Circuit, Expression
from acirverify.smt import SmtScript
from acirverify.solver import (
    SOLVER_ENV,
    BackendConfig,
    ProtocolError,
    SolverSpawnError,
    SolverVerdict,
    default_backend,
    default_solver_command,
    parse_model,
    run_backend,
    run_portfolio,
    select_winner,
)

from conftest import stub_backend


def _tautology(sort="Int"):
    s = SmtScript(logic="QF_NIA" if sort == "Int" else "QF_FF", modulus=17)
    if sort != "Int":
        s.sort_definitions.append(("F", ("_", "FiniteField", "17")))
    s.declare("w0", sort)
    s.goal_symbols = ["w0"]
    s.assertions.append(("=", "w0", "w0"))
    return s


def _one_witness_script():
    return encode_circuit_ff(Circuit(7, 1, ()))


@pytest.mark.parametrize(
    "raw, p, expected",
    [
        ("((w0 (as ff1 F)))", 17, 1),
        ("((w0 16))", 17, 16),
        ("((w0 (- 1)))", 17, 16),
        ("((w0 #f1m17))", 17, 1),
        ("((w0 #f-1m17))", 17, 16),
    ],
)
def test_parse_model(raw, p, expected):
    assert parse_model(raw, ["w0"], p) == {"w0": expected}


def test_negative_numeral_residue_reevaluates():
    (value,) = parse_model("((w0 (- 1)))", ["w0"], 17).values()
    # x + 1 vanishes at the decoded residue exactly when it is -1 mod 17
    assert eval_expression(Expression(lin=((1, 0),), const=1), {0: value}, 17) == 0


@pytest.mark.parametrize("raw", ["((w0 banana))", "((w0 1)", "(w0 1)", "((w1 1))", "w0"])
def test_parse_model_rejects_garbage(raw):
    with pytest.raises(ProtocolError):
        parse_model(raw, ["w0"], 17)


def test_tautology_is_sat(backends):
    v = run_backend(_tautology(), backends["int"])
    assert v.kind == "sat"
    assert set(v.model) == {"w0"}


@pytest.mark.parametrize("name", ["ff-split", "ff-gb"])
def test_ff_tautology_is_sat(backends, name):
    v = run_backend(_tautology("F"), backends[name])
    assert v.kind == "sat"
    assert 0 <= v.model["w0"] < 17


def test_missing_executable():
    cfg = BackendConfig("ff-split", "/nonexistent/solver")
    with pytest.raises(SolverSpawnError):
        run_backend(_tautology(), cfg)


def test_garbage_output_is_protocol_error():
    with pytest.raises(ProtocolError):
        run_backend(_one_witness_script(), stub_backend("ff-split", "--raw=hello there"))


def test_sat_without_model_is_protocol_error():
    with pytest.raises(ProtocolError):
        run_backend(_one_witness_script(), stub_backend("ff-split", "--raw=sat"))


def test_solver_reported_unknown():
    v = run_backend(_one_witness_script(), stub_backend("int", "--answer=unknown"))
    assert (v.kind, v.reason) == ("unknown", "solver-reported")


def test_timeout_kills_solver(tmp_path):
    pidfile = tmp_path / "pid"
    cfg = stub_backend("ff-gb", "--delay=30", f"--pidfile={pidfile}", timeout_ms=300)
    start = time.monotonic()
    v = run_backend(_one_witness_script(), cfg)
    assert time.monotonic() - start < 5
    assert (v.kind, v.reason) == ("unknown", "timeout")
    assert not psutil.pid_exists(int(pidfile.read_text()))


def test_stub_model_is_decoded():
    v = run_backend(_one_witness_script(), stub_backend("ff-split", "--answer=sat", "--value=w0=-1"))
    assert v.model == {"w0": 6}


def _no_children():
    return [p for p in psutil.Process().children(recursive=True) if p.status() != psutil.STATUS_ZOMBIE]


def test_portfolio_first_definitive_wins(tmp_path):
    pids = [tmp_path / f"{n}.pid" for n in range(3)]
    cfgs = [
        stub_backend("ff-split", "--answer=sat", "--delay=20", f"--pidfile={pids[0]}"),
        stub_backend("ff-gb", "--answer=unsat", "--delay=1", f"--pidfile={pids[1]}"),
        stub_backend("int", "--answer=sat", "--delay=20", f"--pidfile={pids[2]}"),
    ]
    script = _one_witness_script()
    start = time.monotonic()
    v = run_portfolio({c.name: script for c in cfgs}, cfgs)
    assert time.monotonic() - start < 8
    assert (v.kind, v.backend) == ("unsat", "ff-gb")
    assert _no_children() == []
    for p in pids:
        assert not psutil.pid_exists(int(p.read_text()))


def test_portfolio_unknown_is_not_definitive():
    cfgs = [
        stub_backend("ff-split", "--answer=unknown"),
        stub_backend("int", "--answer=unsat", "--delay=0.5"),
    ]
    script = _one_witness_script()
    v = run_portfolio({c.name: script for c in cfgs}, cfgs)
    assert (v.kind, v.backend) == ("unsat", "int")


def test_portfolio_all_timeouts():
    cfgs = [stub_backend(n, "--delay=30", timeout_ms=400) for n in ("ff-split", "ff-gb", "int")]
    script = _one_witness_script()
    v = run_portfolio({c.name: script for c in cfgs}, cfgs)
    assert v.kind == "unknown"
    assert v.backend == "portfolio"
    assert v.reason == "ff-split: timeout; ff-gb: timeout; int: timeout"
    assert _no_children() == []


def test_portfolio_survives_one_broken_backend():
    cfgs = [BackendConfig("ff-split", "/nonexistent/solver"), stub_backend("int", "--answer=unsat")]
    script = _one_witness_script()
    assert run_portfolio({c.name: script for c in cfgs}, cfgs).kind == "unsat"


def test_portfolio_all_broken_raises():
    cfgs = [BackendConfig("ff-split", "/nonexistent/a"), BackendConfig("int", "/nonexistent/b")]
    script = _one_witness_script()
    with pytest.raises(SolverSpawnError):
        run_portfolio({c.name: script for c in cfgs}, cfgs)


def test_tie_break_order():
    int_sat = SolverVerdict("sat", "int")
    gb_unsat = SolverVerdict("unsat", "ff-gb")
    split_unknown = SolverVerdict("unknown", "ff-split", reason="timeout")
    assert select_winner([int_sat, gb_unsat, split_unknown]) is gb_unsat
    assert select_winner([int_sat, SolverVerdict("unsat", "ff-split")]).backend == "ff-split"
    assert select_winner([split_unknown, None]) is None


def test_portfolio_agrees_with_interp_on_fixture(backends):
    from conftest import load_fixture
    from acirverify.vc import build_goal_formula, extract_vcs

    c = load_fixture("bool_check_mutated")
    (vc,) = extract_vcs(c)
    cfgs = list(backends.values())
    v = run_portfolio({b.name: build_goal_formula(c, vc, b.encoding) for b in cfgs}, cfgs)
    assert v.kind == "sat"
    assert v.model["w0"] == 1


def test_env_override(monkeypatch):
    monkeypatch.setenv(SOLVER_ENV, "/opt/custom/cvc5")
    assert default_solver_command("int") == ["/opt/custom/cvc5"]
    cfg = default_backend("ff-gb")
    assert cfg.command == ["/opt/custom/cvc5", "--lang=smt2", "--ff-solver=gb"]


def test_backend_config_checks():
    with pytest.raises(ValueError):
        BackendConfig("ff-fast", "cvc5")
    with pytest.raises(ValueError):
        BackendConfig("int", "cvc5", timeout_ms=0)


def test_bundled_driver_accepts_flag_aliases():
    text = "(set-logic QF_FF)\n(declare-const x (_ FiniteField 5))\n(assert (= x (as ff2 (_ FiniteField 5))))\n(check-sat)\n"
    for flag in ("--ff-solver=split", "--ff=gb"):
        out = subprocess.run(
            [sys.executable, "-m", "acirverify.cvc5_driver", flag], input=text, capture_output=True, text=True, timeout=60
        )
        assert out.stdout.split() == ["sat"]


def test_bundled_driver_reports_parse_errors():
    out = subprocess.run(
        [sys.executable, "-m", "acirverify.cvc5_driver"], input="(assert", capture_output=True, text=True, timeout=60
    )
    assert out.returncode == 1
    assert out.stdout.startswith("(error")
