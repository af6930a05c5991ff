"""Runs a submission inside the sandbox scratch directory.

Usage: python3 -I -S -B runner.py main.py

The submission reads the case input from stdin and writes its answer to
stdout. Exit codes: the submission's own status, 1 for an uncaught
exception, 86 when the interpreter ran out of memory.
"""
import runpy
import sys
import traceback

MEMORY_EXIT = 86


def _student_frames(tb, source):
    frames = traceback.extract_tb(tb)
    kept = [f for f in frames if f.filename.endswith(source)]
    return kept or frames


def main():
    if len(sys.argv) != 2:
        sys.stderr.write("runner: expected the submission file name\n")
        return 2
    source = sys.argv[1]
    sys.argv = [source]
    try:
        runpy.run_path(source, run_name="__main__")
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        if isinstance(code, int):
            return code
        sys.stderr.write(str(code) + "\n")
        return 1
    except MemoryError:
        sys.stderr.write("MemoryError: submission exceeded the memory limit\n")
        return MEMORY_EXIT
    except BaseException as exc:  # noqa: BLE001 - report every failure as a verdict
        lines = traceback.format_list(_student_frames(exc.__traceback__, source))
        sys.stderr.write("Traceback (most recent call last):\n")
        sys.stderr.write("".join(lines))
        sys.stderr.write("".join(traceback.format_exception_only(type(exc), exc)))
        return 1
    finally:
        try:
            sys.stdout.flush()
        except Exception:  # noqa: BLE001
            pass
    return 0


if __name__ == "__main__":
    sys.exit(main())
