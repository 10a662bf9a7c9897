"""Minimal cvc5 command-line front end built on the cvc5 Python bindings.

Reads an SMT-LIB2 script from a file argument or stdin and prints command
responses exactly like the cvc5 binary.  Options use the binary's spelling,
``--ff-solver=split`` or ``--produce-models``; ``--ff=X`` is accepted as an
alias of ``--ff-solver=X``.
"""

import sys

ALIASES = {"ff": "ff-solver"}
IGNORED = {"lang", "input-language", "incremental", "quiet", "q"}


def _options(args):
    opts, files = [], []
    for arg in args:
        if not arg.startswith("-"):
            files.append(arg)
            continue
        key, _, value = arg.lstrip("-").partition("=")
        if key in IGNORED:
            continue
        opts.append((ALIASES.get(key, key), value or "true"))
    return opts, files


def main(argv=None) -> int:
    try:
        import cvc5
    except ImportError:
        print('(error "cvc5 Python bindings are not installed")', flush=True)
        return 1
    opts, files = _options(sys.argv[1:] if argv is None else argv)
    text = open(files[0]).read() if files else sys.stdin.read()
    tm = cvc5.TermManager()
    solver = cvc5.Solver(tm)
    try:
        for key, value in opts:
            solver.setOption(key, value)
    except RuntimeError as exc:
        print(f'(error "{exc}")', flush=True)
        return 1
    symbols = cvc5.SymbolManager(tm)
    parser = cvc5.InputParser(solver, symbols)
    parser.setStringInput(cvc5.InputLanguage.SMT_LIB_2_6, text, files[0] if files else "<stdin>")
    while True:
        try:
            cmd = parser.nextCommand()
        except RuntimeError as exc:
            msg = str(exc).replace('"', "'")
            print(f'(error "{msg}")', flush=True)
            return 1
        if cmd.isNull():
            return 0
        sys.stdout.write(cmd.invoke(solver, symbols))
        sys.stdout.flush()


if __name__ == "__main__":
    sys.exit(main())
