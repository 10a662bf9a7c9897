import sys
from pathlib import Path

import pytest

from acirverify.ir import parse_circuit
from acirverify.solver import BackendConfig, default_backend

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"
STUB = Path(__file__).resolve().parent / "stub_solver.py"

sys.path.insert(0, str(Path(__file__).resolve().parent))


def load_fixture(name: str):
    return parse_circuit((FIXTURES / f"{name}.acir").read_text())


def stub_backend(name: str, *args: str, timeout_ms: int = 10_000) -> BackendConfig:
    return BackendConfig(name, sys.executable, (str(STUB), *args), timeout_ms)


@pytest.fixture(scope="session")
def backends():
    return {name: default_backend(name) for name in ("ff-split", "ff-gb", "int")}


def extend_assignment(c, a: dict[int, int]) -> dict[str, int]:
    """Values for every symbol an encoding declares, given witness values.

    Mirrors the vacuous memory semantics by direct simulation: range bits are
    the binary digits of the witness, cells follow each write generation.
    """
    from acirverify.interp import eval_expression
    from acirverify.ir import MemoryInit, MemoryOp, RangeCheck

    p = c.modulus
    env = {f"w{w}": v % p for w, v in a.items()}
    blocks: dict[int, list[int]] = {}
    gens: dict[int, int] = {}
    for k, op in enumerate(c.opcodes):
        if isinstance(op, RangeCheck):
            v = a[op.witness] % p
            for j in range(op.bits):
                env[f"rb_{k}_{j}"] = (v >> j) & 1
        elif isinstance(op, MemoryInit):
            blocks[op.block_id] = [a[w] % p for w in op.witnesses]
            gens[op.block_id] = 0
            for i, v in enumerate(blocks[op.block_id]):
                env[f"m_{op.block_id}_{i}_0"] = v
        elif isinstance(op, MemoryOp) and op.is_write:
            block = blocks[op.block_id]
            idx = eval_expression(op.index, a, p)
            if idx < len(block):
                block[idx] = eval_expression(op.value, a, p)
            gens[op.block_id] += 1
            for i, v in enumerate(block):
                env[f"m_{op.block_id}_{i}_{gens[op.block_id]}"] = v
    return env


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}: {detail}")
