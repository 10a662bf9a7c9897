"""External SMT solver processes: single runs and a racing portfolio."""

from __future__ import annotations

import logging
import os
import queue
import re
import shutil
import signal
import subprocess
import sys
import threading
import time
from dataclasses import dataclass, field

from .smt import SExprError, SmtScript, parse_sexprs

log = logging.getLogger(__name__)

BACKENDS = ("ff-split", "ff-gb", "int")
DEFAULT_TIMEOUT_MS = 120_000
SOLVER_ENV = "NAVE_SOLVER_PATH"

CVC5_ARGS = {
    "ff-split": ("--lang=smt2", "--ff-solver=split"),
    "ff-gb": ("--lang=smt2", "--ff-solver=gb"),
    "int": ("--lang=smt2",),
}

Z3_ARGS = ("-in", "-smt2")

_POLL_S = 0.02


class SolverError(Exception):
    pass


class SolverSpawnError(SolverError):
    pass


class ProtocolError(SolverError):
    pass


@dataclass(frozen=True)
class BackendConfig:
    name: str
    solver_executable: str
    extra_args: tuple[str, ...] = ()
    timeout_ms: int = DEFAULT_TIMEOUT_MS

    def __post_init__(self):
        if self.name not in BACKENDS:
            raise ValueError(f"unknown backend {self.name!r}; expected one of {', '.join(BACKENDS)}")
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")
        object.__setattr__(self, "extra_args", tuple(self.extra_args))

    @property
    def encoding(self) -> str:
        return "int" if self.name == "int" else "ff"

    @property
    def command(self) -> list[str]:
        return [self.solver_executable, *self.extra_args]


def default_solver_command(backend: str = "ff-split") -> list[str]:
    """Solver launcher for ``backend``.

    $NAVE_SOLVER_PATH wins.  Otherwise finite-field backends use a cvc5
    binary or the bundled cvc5 front end; the integer backend prefers z3.
    """
    env = os.environ.get(SOLVER_ENV)
    if env:
        return [env]
    candidates = ("z3", "cvc5", "acir-cvc5") if backend == "int" else ("cvc5", "acir-cvc5")
    for exe in candidates:
        found = shutil.which(exe)
        if found:
            return [found]
    return [sys.executable, "-m", "acirverify.cvc5_driver"]


def default_backend(
    name: str, solver: str | None = None, extra_args=None, timeout_ms: int = DEFAULT_TIMEOUT_MS
) -> BackendConfig:
    cmd = [solver] if solver else default_solver_command(name)
    if extra_args is not None:
        args = tuple(extra_args)
    elif os.path.basename(cmd[0]).startswith("z3"):
        args = Z3_ARGS
    else:
        args = CVC5_ARGS[name]
    return BackendConfig(name, cmd[0], (*cmd[1:], *args), timeout_ms)


@dataclass
class SolverVerdict:
    kind: str  # "sat" | "unsat" | "unknown"
    backend: str
    elapsed_ms: float = 0.0
    model: dict[str, int] = field(default_factory=dict)
    reason: str | None = None

    @property
    def definitive(self) -> bool:
        return self.kind in ("sat", "unsat")

    def __str__(self):
        extra = f" ({self.reason})" if self.reason else ""
        return f"{self.kind}{extra} [{self.backend}, {self.elapsed_ms:.0f} ms]"


_FF_HASH = re.compile(r"#f(-?\d+)m(\d+)$")


def _decode_value(v, modulus: int | None) -> int:
    n = None
    if isinstance(v, str):
        m = _FF_HASH.match(v)
        if m:
            n = int(m.group(1))
        elif re.fullmatch(r"-?\d+", v):
            n = int(v)
    elif len(v) == 3 and v[0] == "as" and isinstance(v[1], str) and v[1].startswith("ff"):
        try:
            n = int(v[1][2:])
        except ValueError:
            pass
    elif len(v) == 2 and v[0] == "-":
        n = -_decode_value(v[1], None)
    if n is None:
        raise ProtocolError(f"cannot decode model value {v!r}")
    return n % modulus if modulus else n


def parse_model(raw, goal_symbols, modulus: int | None = None) -> dict[str, int]:
    """Decode a get-value response into residues in ``[0, modulus)``."""
    if isinstance(raw, str):
        try:
            forms = parse_sexprs(raw)
        except SExprError as exc:
            raise ProtocolError(f"malformed model: {exc}: {raw!r}") from None
        if len(forms) != 1:
            raise ProtocolError(f"expected one get-value response, got {raw!r}")
        raw = forms[0]
    if isinstance(raw, str):
        raise ProtocolError(f"expected a list of bindings, got {raw!r}")
    model = {}
    for pair in raw:
        if isinstance(pair, str) or len(pair) != 2 or not isinstance(pair[0], str):
            raise ProtocolError(f"malformed binding {pair!r}")
        model[pair[0]] = _decode_value(pair[1], modulus)
    missing = [g for g in goal_symbols if g not in model]
    if missing:
        raise ProtocolError(f"model lacks value for {missing[0]}")
    return {g: model[g] for g in goal_symbols}


def _interpret_output(out: str, script: SmtScript, cfg: BackendConfig, elapsed: float) -> SolverVerdict:
    try:
        forms = parse_sexprs(out)
    except SExprError as exc:
        raise ProtocolError(f"{cfg.name}: unparseable output ({exc}): {out!r}") from None
    if not forms or forms[0] not in ("sat", "unsat", "unknown"):
        raise ProtocolError(f"{cfg.name}: unexpected solver output: {out.strip()!r}")
    head = forms[0]
    if head == "unsat":
        return SolverVerdict("unsat", cfg.name, elapsed)
    if head == "unknown":
        return SolverVerdict("unknown", cfg.name, elapsed, reason="solver-reported")
    model = {}
    if script.goal_symbols:
        if len(forms) < 2:
            raise ProtocolError(f"{cfg.name}: sat without a model: {out.strip()!r}")
        model = parse_model(forms[1], script.goal_symbols, script.modulus)
    return SolverVerdict("sat", cfg.name, elapsed, model=model)


def _kill(proc: subprocess.Popen):
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        pass
    try:
        proc.communicate(timeout=5)
    except (subprocess.TimeoutExpired, ValueError):
        proc.kill()
        proc.wait()


def run_backend(script: SmtScript, cfg: BackendConfig, cancel: threading.Event | None = None) -> SolverVerdict:
    """Solve ``script`` with one backend; blocks until done, timed out or cancelled."""
    text = script.to_smtlib(get_model=True)
    start = time.monotonic()
    deadline = start + cfg.timeout_ms / 1000
    try:
        proc = subprocess.Popen(
            cfg.command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
            start_new_session=True,
        )
    except OSError as exc:
        raise SolverSpawnError(f"{cfg.name}: cannot start {cfg.solver_executable!r}: {exc}") from exc

    def elapsed():
        return (time.monotonic() - start) * 1000

    pending = text
    try:
        while True:
            try:
                out, err = proc.communicate(input=pending, timeout=_POLL_S)
                break
            except subprocess.TimeoutExpired:
                pending = None
                if cancel is not None and cancel.is_set():
                    _kill(proc)
                    return SolverVerdict("unknown", cfg.name, elapsed(), reason="cancelled")
                if time.monotonic() >= deadline:
                    _kill(proc)
                    return SolverVerdict("unknown", cfg.name, elapsed(), reason="timeout")
    finally:
        if proc.poll() is None:
            _kill(proc)
    verdict = _interpret_output(out, script, cfg, elapsed())
    if err.strip():
        log.debug("%s stderr: %s", cfg.name, err.strip())
    return verdict


def select_winner(verdicts) -> SolverVerdict | None:
    """Definitive verdict with the best backend rank among ``verdicts``, if any."""
    rank = {name: i for i, name in enumerate(BACKENDS)}
    decided = [v for v in verdicts if v is not None and v.definitive]
    return min(decided, key=lambda v: rank[v.backend], default=None)


def run_portfolio(scripts: dict[str, SmtScript], cfgs: list[BackendConfig]) -> SolverVerdict:
    """Race every configured backend; the first sat/unsat wins and the rest are killed.

    Simultaneous finishers are ranked ff-split, ff-gb, int.  If nobody is
    definitive the result is unknown with every backend's reason.
    """
    if not cfgs:
        raise ValueError("portfolio needs at least one backend")
    rank = {name: i for i, name in enumerate(BACKENDS)}
    cancel = threading.Event()
    results: queue.Queue = queue.Queue()

    def work(cfg):
        try:
            results.put((cfg, run_backend(scripts[cfg.name], cfg, cancel), None))
        except Exception as exc:
            results.put((cfg, None, exc))

    threads = [threading.Thread(target=work, args=(cfg,), daemon=True) for cfg in cfgs]
    for t in threads:
        t.start()

    finished = []
    winner = None
    while len(finished) < len(cfgs):
        finished.append(results.get())
        while True:
            try:
                finished.append(results.get_nowait())
            except queue.Empty:
                break
        winner = select_winner(v for _, v, _ in finished)
        if winner is not None:
            break
    cancel.set()
    for t in threads:
        t.join()
    if winner is not None:
        return winner
    errors = [exc for _, _, exc in finished if exc is not None]
    if len(errors) == len(cfgs):
        raise errors[0]
    reasons = []
    for cfg, v, exc in sorted(finished, key=lambda f: rank[f[0].name]):
        reasons.append(f"{cfg.name}: {v.reason if v else exc}")
    elapsed = max((v.elapsed_ms for _, v, _ in finished if v), default=0.0)
    return SolverVerdict("unknown", "portfolio", elapsed, reason="; ".join(reasons))
