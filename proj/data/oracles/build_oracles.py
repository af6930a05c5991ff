"""Freezes reference values for the metric and grading checks.

Everything here is computed without the C++ code: metrics by direct
enumeration, the off-by-one verdict pattern by running the program with a
plain python3 subprocess. Run once; the acceptance binary reads oracles.json.
"""
import itertools
import json
import pathlib
import subprocess

HERE = pathlib.Path(__file__).resolve().parent
ROOT = HERE.parent


def pass_at_k(m):
    return sum(any(all(sample) for sample in problem) for problem in m) / len(m)


def recall_at_k(m):
    cells = [c for problem in m for sample in problem for c in sample]
    return sum(cells) / len(cells)


def tir(pre, post):
    return (post - pre) / pre * 100


def matrix(n, k, m, value):
    return [[[value] * m for _ in range(k)] for _ in range(n)]


def half_true():
    flat = [i % 2 == 0 for i in range(2 * 2 * 3)]
    it = iter(flat)
    return [[[next(it) for _ in range(3)] for _ in range(2)] for _ in range(2)]


def main():
    pass_examples = [
        {"name": "all true", "matrix": matrix(2, 3, 4, True)},
        {"name": "all false", "matrix": matrix(2, 3, 4, False)},
        {"name": "one solved of two", "matrix": [[[False, True], [True, True]], [[True, False], [False, True]]]},
    ]
    recall_examples = [
        {"name": "all true", "matrix": matrix(1, 2, 3, True)},
        {"name": "half true", "matrix": half_true()},
        {"name": "7 and 3 of 10", "matrix": [[[c < 7 for c in range(10)], [c < 3 for c in range(10)]]]},
    ]
    for e in pass_examples:
        e["expected"] = pass_at_k(e["matrix"])
    for e in recall_examples:
        e["expected"] = recall_at_k(e["matrix"])
    tir_examples = [
        {"pre": 0.4, "post": 0.6, "expected": round(tir(0.4, 0.6), 9)},
        {"pre": 0.5, "post": 0.5, "expected": round(tir(0.5, 0.5), 9)},
        {"pre": 0.0, "post": 0.3, "error": "undefined_baseline"},
    ]

    problem = next(json.loads(line) for line in (ROOT / "problems" / "toy.jsonl").read_text().splitlines()
                   if json.loads(line)["problem_id"] == "sum-to-n")
    off_by_one = "n = int(input())\nprint(sum(range(1, n)))\n"
    pattern = []
    for case in problem["test_cases"]:
        out = subprocess.run(["python3", "-c", off_by_one], input=case["input"], capture_output=True,
                             text=True, check=True).stdout
        pattern.append(out.split() == case["expected_output"].split())

    # Fold sizes for N problems over F folds: first N % F folds get one extra.
    fold_sizes = {f"{n}/{f}": [n // f + (1 if i < n % f else 0) for i in range(f)]
                  for n, f in itertools.product([10, 11, 100], [5])}

    out = {
        "pass_at_k": pass_examples,
        "recall_at_k": recall_examples,
        "tir": tir_examples,
        "off_by_one": {"problem_id": "sum-to-n", "source": off_by_one, "case_results": pattern},
        "fold_sizes": fold_sizes,
        "protocol": {"T": 20, "K": 3, "M": 10, "folds": 5},
    }
    (HERE / "oracles.json").write_text(json.dumps(out, indent=1) + "\n")


if __name__ == "__main__":
    main()
