"""Minimal runner speaking the verification shim protocol.

Reads one JSON manifest from stdin, runs it, and writes one JSON verdict line
to the original stdout. Exit status 0 whenever a verdict line was written,
70 on an internal fault.
"""
import ast
import contextlib
import io
import json
import os
import signal
import sys
import time
import traceback

SHIM_FAULT = 70


class CaseBudgetExceeded(Exception):
    pass


def _on_alarm(signum, frame):
    raise CaseBudgetExceeded("case time budget exceeded")


def _exc_text(exc):
    name = type(exc).__name__
    msg = str(exc)
    return f"{name}: {msg}" if msg else name


@contextlib.contextmanager
def _budget(seconds):
    if seconds and seconds > 0:
        signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)


def _check_assertion(source, namespace):
    """Returns None on success or a failure message; raises on error."""
    tree = ast.parse(source, mode="exec")
    if len(tree.body) != 1 or not isinstance(tree.body[0], ast.Assert):
        exec(compile(tree, "<test>", "exec"), namespace)
        return None
    test = tree.body[0].test
    if (isinstance(test, ast.Compare) and len(test.ops) == 1 and isinstance(test.ops[0], ast.Eq)):
        left = eval(compile(ast.Expression(test.left), "<test>", "eval"), namespace)
        right = eval(compile(ast.Expression(test.comparators[0]), "<test>", "eval"), namespace)
        if left == right:
            return None
        return f"AssertionError: {left!r} != {right!r}"
    value = eval(compile(ast.Expression(test), "<test>", "eval"), namespace)
    return None if value else "AssertionError"


def run_assert_list(m):
    namespace = {"__name__": "candidate"}
    durations = []
    captured = io.StringIO()
    budget = m.get("case_time_budget_s") or 0
    with contextlib.redirect_stdout(captured):
        try:
            with _budget(budget):
                exec(compile(m["candidate"], "<candidate>", "exec"), namespace)
                if m.get("setup"):
                    exec(compile(m["setup"], "<setup>", "exec"), namespace)
        except BaseException as exc:  # candidate faults at load time
            return {"verdict": "error", "failed_case_index": None, "exception": _exc_text(exc),
                    "durations_ms": durations, "outputs": []}
        for i, assertion in enumerate(m.get("assertions", [])):
            start = time.monotonic()
            try:
                with _budget(budget):
                    failure = _check_assertion(assertion, namespace)
            except BaseException as exc:
                durations.append((time.monotonic() - start) * 1000.0)
                return {"verdict": "error", "failed_case_index": i, "exception": _exc_text(exc),
                        "durations_ms": durations, "outputs": []}
            durations.append((time.monotonic() - start) * 1000.0)
            if failure is not None:
                return {"verdict": "fail", "failed_case_index": i, "exception": failure,
                        "durations_ms": durations, "outputs": []}
    return {"verdict": "pass", "failed_case_index": None, "exception": None,
            "durations_ms": durations, "outputs": []}


def run_stdin_stdout(m):
    code = compile(m["candidate"], "<candidate>", "exec")
    budget = m.get("case_time_budget_s") or 0
    durations = []
    outputs = []
    for i, case in enumerate(m.get("io_cases", [])):
        namespace = {"__name__": "__main__"}
        captured = io.StringIO()
        saved_stdin = sys.stdin
        sys.stdin = io.StringIO(case.get("input", ""))
        start = time.monotonic()
        error = None
        try:
            with contextlib.redirect_stdout(captured), _budget(budget):
                try:
                    exec(code, namespace)
                except SystemExit as exc:
                    if exc.code not in (None, 0):
                        raise
        except BaseException as exc:
            error = _exc_text(exc)
        finally:
            sys.stdin = saved_stdin
        durations.append((time.monotonic() - start) * 1000.0)
        outputs.append(captured.getvalue())
        if error is not None:
            return {"verdict": "error", "failed_case_index": i, "exception": error,
                    "durations_ms": durations, "outputs": outputs}
    return {"verdict": "pass", "failed_case_index": None, "exception": None,
            "durations_ms": durations, "outputs": outputs}


def main():
    verdict_fd = os.dup(1)
    devnull = os.open(os.devnull, os.O_WRONLY)
    os.dup2(devnull, 1)
    sys.stdout = io.TextIOWrapper(os.fdopen(1, "wb", closefd=False), write_through=True)
    signal.signal(signal.SIGALRM, _on_alarm)
    try:
        manifest = json.loads(sys.stdin.read())
        style = manifest["style"]
        if style == "assert_list":
            result = run_assert_list(manifest)
        elif style == "stdin_stdout":
            result = run_stdin_stdout(manifest)
        else:
            raise ValueError(f"unknown style {style!r}")
    except Exception:
        traceback.print_exc(file=sys.stderr)
        return SHIM_FAULT
    with os.fdopen(verdict_fd, "w") as out:
        out.write(json.dumps(result) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
