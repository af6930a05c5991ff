#!/usr/bin/env python3
"""Regenerates the toy problem set and its scripted LLM/crawl fixtures.

Expected outputs come from running each reference solution, and are checked
against an independent closed-form answer for every case.

    python3 data/generate_toy.py
"""
import hashlib
import json
import math
import os
import random
import subprocess
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
PROBLEMS = os.path.join(HERE, "problems", "toy.jsonl")
FIXTURES = os.path.join(HERE, "fixtures", "toy")

LEVELS = ["low", "medium", "high"]
TUTORS = ["codeedu", "baseline"]
K = 3
STOP_TURN = 4


def fizz(i):
    return "FizzBuzz" if i % 15 == 0 else "Fizz" if i % 3 == 0 else "Buzz" if i % 5 == 0 else str(i)


def bsearch_case(values, target):
    return f"{' '.join(map(str, values))}\n{target}\n"


# Each problem: cases as (stdin, oracle answer), plus a reference solution,
# a partially correct attempt and a wrong attempt.
PROBLEMS_SPEC = [
    dict(
        problem_id="sum-to-n", title="Sum to N", topics=["loops"], difficulty="easy",
        statement="Read an integer n (0 <= n <= 10000) and print 1 + 2 + ... + n.",
        concepts="A for loop over range(1, n + 1) accumulates a running total; the closed form is n(n+1)/2.",
        sample_code="total = 0\nfor x in [3, 4, 5]:\n    total += x\nprint(total)\n",
        reference="n = int(input())\nprint(n * (n + 1) // 2)\n",
        partial="n = int(input())\nprint(sum(range(n)))\n",
        wrong="n = int(input())\nprint(n * n)\n",
        cases=[(f"{n}\n", str(n * (n + 1) // 2)) for n in [0, 1, 2, 3, 5, 10, 17, 100, 999, 10000]],
    ),
    dict(
        problem_id="factorial", title="Factorial", topics=["recursion"], difficulty="easy",
        statement="Read an integer n (0 <= n <= 20) and print n!.",
        concepts="Recursion: fact(n) = n * fact(n - 1) with base case fact(0) = 1.",
        sample_code="def countdown(n):\n    if n == 0:\n        return\n    print(n)\n    countdown(n - 1)\n",
        reference="def fact(n):\n    return 1 if n == 0 else n * fact(n - 1)\nprint(fact(int(input())))\n",
        partial="def fact(n):\n    return 1 if n <= 1 else n * fact(n - 1)\nn = int(input())\nprint(fact(n) if n < 6 else fact(n - 1))\n",
        wrong="n = int(input())\nprint(n)\n",
        cases=[(f"{n}\n", str(math.factorial(n))) for n in [0, 1, 2, 3, 4, 5, 7, 10, 15, 20]],
    ),
    dict(
        problem_id="fibonacci", title="Fibonacci Number", topics=["recursion"], difficulty="medium",
        statement="Read n (0 <= n <= 60) and print F(n), where F(0) = 0, F(1) = 1, F(n) = F(n-1) + F(n-2).",
        concepts="Naive recursion repeats work; memoization or an iterative pair (a, b) keeps it linear.",
        sample_code="a, b = 0, 1\nfor _ in range(5):\n    print(a)\n    a, b = b, a + b\n",
        reference="n = int(input())\na, b = 0, 1\nfor _ in range(n):\n    a, b = b, a + b\nprint(a)\n",
        partial="n = int(input())\na, b = 1, 1\nfor _ in range(n - 1):\n    a, b = b, a + b\nprint(a if n > 0 else 0)\n",
        wrong="n = int(input())\nprint(2 ** n)\n",
        cases=None,
    ),
    dict(
        problem_id="reverse-string", title="Reverse a String", topics=["strings"], difficulty="easy",
        statement="Read one line of text and print it reversed.",
        concepts="Strings are sequences; slicing with a negative step s[::-1] walks them backwards.",
        sample_code="s = 'hello'\nprint(s[1:4])\n",
        reference="print(input()[::-1])\n",
        partial="s = input()\nprint(s[::-1] if len(s) < 5 else s[:0:-1])\n",
        wrong="print(input())\n",
        cases=[(f"{s}\n", s[::-1]) for s in ["a", "ab", "abc", "race", "hello", "Python", "stressed", "x y z", "12345", "level up"]],
    ),
    dict(
        problem_id="palindrome", title="Palindrome Check", topics=["strings"], difficulty="easy",
        statement="Read one word and print yes if it reads the same backwards, otherwise no.",
        concepts="Compare a string with its reverse, or walk two indices inward from both ends.",
        sample_code="word = 'abc'\nprint(word == 'abc')\n",
        reference="s = input().strip()\nprint('yes' if s == s[::-1] else 'no')\n",
        partial="s = input().strip()\nprint('yes' if s[0] == s[-1] else 'no')\n",
        wrong="print('yes')\n",
        cases=[(f"{s}\n", "yes" if s == s[::-1] else "no")
               for s in ["a", "aa", "ab", "aba", "abca", "racecar", "rotator", "abcdba", "noon", "python"]],
    ),
    dict(
        problem_id="count-vowels", title="Count Vowels", topics=["strings"], difficulty="easy",
        statement="Read one line and print how many of its characters are vowels (a, e, i, o, u, either case).",
        concepts="Iterate over characters and test membership in a set of vowels; lower() normalizes case.",
        sample_code="count = 0\nfor ch in 'banana':\n    if ch == 'a':\n        count += 1\nprint(count)\n",
        reference="print(sum(1 for c in input().lower() if c in 'aeiou'))\n",
        partial="print(sum(1 for c in input() if c in 'aeiou'))\n",
        wrong="print(len(input()))\n",
        cases=[(f"{s}\n", str(sum(c in "aeiouAEIOU" for c in s)))
               for s in ["xyz", "a", "hello", "banana", "AEIOU", "Programming", "rhythm", "Queue", "sky high", "Education"]],
    ),
    dict(
        problem_id="max-of-list", title="Maximum of a List", topics=["lists"], difficulty="easy",
        statement="Read a line of space-separated integers and print the largest.",
        concepts="Track the best value seen so far while looping; beware lists of only negative numbers.",
        sample_code="values = [int(x) for x in '3 1 2'.split()]\nprint(values[0])\n",
        reference="values = [int(x) for x in input().split()]\nbest = values[0]\nfor v in values:\n    if v > best:\n        best = v\nprint(best)\n",
        partial="values = [int(x) for x in input().split()]\nbest = 0\nfor v in values:\n    if v > best:\n        best = v\nprint(best)\n",
        wrong="values = input().split()\nprint(values[-1])\n",
        cases=[(" ".join(map(str, v)) + "\n", str(max(v))) for v in
               [[5], [1, 2, 3], [3, 2, 1], [-1, -5, -3], [0, 0], [7, 7, 2], [-10], [4, 9, 1, 9], [100, -100, 50], [-2, -1]]],
    ),
    dict(
        problem_id="binary-search", title="Binary Search", topics=["binary search"], difficulty="medium",
        statement="The first line holds sorted distinct integers, the second a target. Print the target's 0-based index, or -1.",
        concepts="Keep a half-open window [lo, hi); compare the middle element and discard the half that cannot hold the target.",
        sample_code="lo, hi = 0, 8\nwhile lo < hi:\n    mid = (lo + hi) // 2\n    print(mid)\n    hi = mid\n",
        reference="values = [int(x) for x in input().split()]\ntarget = int(input())\nlo, hi = 0, len(values)\nwhile lo < hi:\n    mid = (lo + hi) // 2\n    if values[mid] < target:\n        lo = mid + 1\n    else:\n        hi = mid\nprint(lo if lo < len(values) and values[lo] == target else -1)\n",
        partial="values = [int(x) for x in input().split()]\ntarget = int(input())\nprint(values.index(target) if target in values[:-1] else -1)\n",
        wrong="values = input().split()\ntarget = input()\nprint(0)\n",
        cases=None,
    ),
    dict(
        problem_id="gcd", title="Greatest Common Divisor", topics=["recursion", "math"], difficulty="easy",
        statement="Read two positive integers a and b on one line and print their greatest common divisor.",
        concepts="Euclid's algorithm: gcd(a, b) = gcd(b, a mod b), ending when b is 0.",
        sample_code="print(17 % 5)\n",
        reference="def gcd(a, b):\n    return a if b == 0 else gcd(b, a % b)\na, b = map(int, input().split())\nprint(gcd(a, b))\n",
        partial="a, b = map(int, input().split())\nprint(min(a, b) if max(a, b) % min(a, b) == 0 else 1)\n",
        wrong="a, b = map(int, input().split())\nprint(a * b)\n",
        cases=[(f"{a} {b}\n", str(math.gcd(a, b))) for a, b in
               [(1, 1), (2, 4), (12, 18), (17, 5), (100, 10), (21, 14), (9, 28), (48, 180), (7, 7), (270, 192)]],
    ),
    dict(
        problem_id="fizzbuzz", title="FizzBuzz", topics=["loops"], difficulty="easy",
        statement="Read n and print the numbers 1..n one per line, printing Fizz for multiples of 3, Buzz for multiples of 5 and FizzBuzz for multiples of both.",
        concepts="Test divisibility with %; check the combined case (15) before the single ones.",
        sample_code="for i in range(1, 4):\n    print(i % 2)\n",
        reference="n = int(input())\nfor i in range(1, n + 1):\n    print('FizzBuzz' if i % 15 == 0 else 'Fizz' if i % 3 == 0 else 'Buzz' if i % 5 == 0 else i)\n",
        partial="n = int(input())\nfor i in range(1, n + 1):\n    print('Fizz' if i % 3 == 0 else 'Buzz' if i % 5 == 0 else i)\n",
        wrong="n = int(input())\nfor i in range(n):\n    print(i)\n",
        cases=[(f"{n}\n", "\n".join(fizz(i) for i in range(1, n + 1))) for n in [1, 2, 3, 5, 6, 10, 14, 15, 16, 30]],
    ),
]

FIB = [0, 1]
while len(FIB) < 61:
    FIB.append(FIB[-1] + FIB[-2])
PROBLEMS_SPEC[2]["cases"] = [(f"{n}\n", str(FIB[n])) for n in [0, 1, 2, 3, 5, 8, 10, 20, 40, 60]]
_sorted = [-7, -2, 0, 3, 8, 11, 15, 21]
PROBLEMS_SPEC[7]["cases"] = [
    (bsearch_case(_sorted, t), str(_sorted.index(t) if t in _sorted else -1))
    for t in [-7, 21, 0, 3, 15, 4, -8, 22]
] + [(bsearch_case([5], 5), "0"), (bsearch_case([5], 6), "-1")]


def run(source, stdin):
    out = subprocess.run([sys.executable, "-I", "-S", "-c", source], input=stdin, capture_output=True,
                         text=True, timeout=10)
    if out.returncode != 0:
        raise SystemExit(f"reference failed: {out.stderr}")
    return out.stdout


def normalize(text):
    lines = [line.rstrip() for line in text.split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines)


def fenced(source):
    return f"Here is my solution:\n```python\n{source}```\n"


def write_json(path, doc):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def query_key(query):
    h = 0xcbf29ce484222325
    for c in " ".join(query.lower().split()).encode():
        h ^= c
        h = (h * 0x100000001b3) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


def build_problems():
    lines = []
    for spec in PROBLEMS_SPEC:
        cases = []
        for stdin, oracle in spec["cases"]:
            produced = normalize(run(spec["reference"], stdin))
            if produced != normalize(oracle):
                raise SystemExit(f"{spec['problem_id']}: reference gives {produced!r}, oracle {oracle!r}")
            cases.append({"input": stdin, "expected_output": produced + "\n", "comparison": "whitespace"})
        assert len(cases) == 10
        problem = {
            "problem_id": spec["problem_id"], "title": spec["title"], "statement": spec["statement"],
            "concepts": spec["concepts"], "sample_code": spec["sample_code"],
            "reference_solution": spec["reference"], "test_cases": cases,
            "difficulty": spec["difficulty"], "topics": spec["topics"],
        }
        if spec["problem_id"] == "fizzbuzz":
            problem["steps"] = [
                {"prompt": "Print the numbers 1..n, one per line.", "hint": "range(1, n + 1)", "cases": [0, 1]},
                {"prompt": "Replace multiples of 3 with Fizz.", "hint": "i % 3 == 0", "cases": [0, 1, 2, 3]},
                {"prompt": "Add Buzz and FizzBuzz.", "hint": "check 15 first", "cases": list(range(10))},
            ]
        lines.append(json.dumps(problem))
    os.makedirs(os.path.dirname(PROBLEMS), exist_ok=True)
    with open(PROBLEMS, "w") as f:
        f.write("\n".join(lines) + "\n")


# Chance that one submission is the correct solution.
P_CORRECT = {
    ("pre", "none"): {"low": 0.15, "medium": 0.3, "high": 0.5},
    ("post", "baseline"): {"low": 0.2, "medium": 0.4, "high": 0.6},
    ("post", "codeedu"): {"low": 0.45, "medium": 0.65, "high": 0.85},
}


def student_fixture(rng):
    entries = []
    for spec in PROBLEMS_SPEC:
        pid = spec["problem_id"]
        for level in LEVELS:
            for turn in range(1, 21):
                entries.append({
                    "match": f"[problem={pid} level={level} phase=chat turn={turn}]",
                    "response": f"<<{pid}>> Question {turn}: I am stuck on '{spec['title']}'. "
                                f"Which idea should I use next?",
                    "repeat": True})
            for phase, tutor in [("pre", "none"), ("post", "baseline"), ("post", "codeedu")]:
                for k in range(1, K + 1):
                    roll = rng.random()
                    if roll < P_CORRECT[(phase, tutor)][level]:
                        reply = fenced(spec["reference"])
                    elif level == "low" and roll > 0.95:
                        reply = "I am not sure how to write this yet, sorry."
                    elif roll < 0.7:
                        reply = fenced(spec["partial"])
                    else:
                        reply = fenced(spec["wrong"])
                    entries.append({"match": f"[problem={pid} level={level} phase={phase} tutor={tutor} k={k}]",
                                    "response": reply, "repeat": True})
    return {"mode": "substring", "entries": entries,
            "fallback": "I do not have anything to add."}


def tutor_fixture(style):
    entries = []
    for spec in PROBLEMS_SPEC:
        if style == "codeedu":
            text = (f"Let's break '{spec['title']}' into steps. First, {spec['concepts']} "
                    f"Then read the input exactly as stated and print only the answer. Try the smallest case by hand.")
        else:
            text = f"For '{spec['title']}': {spec['concepts']}"
        entries.append({"match": f"<<{spec['problem_id']}>>", "response": text, "repeat": True})
    return {"mode": "substring", "entries": entries, "fallback": "Think about the input format first."}


TOPIC_NOTES = {
    "loops": ("Loops", "A for loop repeats a block once per item of a sequence; range(a, b) yields a..b-1."),
    "recursion": ("Recursion", "A recursive function calls itself on a smaller input and stops at a base case."),
    "strings": ("Strings", "Strings are immutable sequences of characters that support indexing and slicing."),
    "lists": ("Lists", "Lists are mutable sequences; iterate them with for and compare elements as you go."),
    "binary search": ("Binary search", "Binary search halves a sorted search window each step, taking O(log n)."),
}


def researcher_fixture():
    entries = []
    for topic, (title, note) in TOPIC_NOTES.items():
        text = (f"# {title}\n\n## Core idea\n\n{note} [1]\n\n"
                f"## Worked example\n\nStep-by-step: trace a tiny input by hand before coding. [2]\n\n"
                f"## Practice\n\nWrite a first version, run it on the sample, then handle edge cases.\n")
        entries.append({"match": f"learning material on {topic}\n", "response": text, "repeat": True})
    return {"mode": "substring", "entries": entries}


def baseline_material_fixture():
    entries = []
    for topic, (title, note) in TOPIC_NOTES.items():
        entries.append({"match": f"[material topic={topic}]", "response": f"# {title}\n\n{note}\n", "repeat": True})
    return entries


def build_fixtures():
    rng = random.Random(20241019)
    llm = os.path.join(FIXTURES, "llm")
    write_json(os.path.join(llm, "student.json"), student_fixture(rng))
    write_json(os.path.join(llm, "tutor.json"), tutor_fixture("codeedu"))
    baseline = tutor_fixture("baseline")
    baseline["entries"] += baseline_material_fixture()
    write_json(os.path.join(llm, "baseline_tutor.json"), baseline)
    write_json(os.path.join(llm, "researcher.json"), researcher_fixture())
    write_json(os.path.join(llm, "judge.json"), {
        "mode": "substring",
        "entries": [{"match": "## Worked example", "response": "IA=5 CC=4 INT=4 PER=4", "repeat": True}],
        "fallback": "IA=4 CC=4 INT=3 PER=3"})
    write_json(os.path.join(llm, "stop_check.json"), {
        "mode": "substring",
        "entries": [{"match": f"[turn={STOP_TURN}]", "response": "YES", "repeat": True}],
        "fallback": "NO"})

    corpus = os.path.join(FIXTURES, "corpus")
    for topic, (title, note) in TOPIC_NOTES.items():
        slug = topic.replace(" ", "-")
        doc = {"query": topic, "results": [
            {"url": f"https://docs.example.org/{slug}", "title": f"{title} reference", "snippet": note, "text": note},
            {"url": f"https://tutorial.example.org/{slug}", "title": f"{title} tutorial",
             "snippet": "Worked examples", "text": f"Worked examples of {topic}."},
        ]}
        write_json(os.path.join(corpus, query_key(topic) + ".json"), doc)


if __name__ == "__main__":
    build_problems()
    build_fixtures()
    print(f"wrote {PROBLEMS} and {FIXTURES}")
