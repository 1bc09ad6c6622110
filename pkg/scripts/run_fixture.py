#!/usr/bin/env python3
"""Run both engines on the bundled hiring-panel example and print every
intermediate table, mirroring the layout of the worked tables the example
was calibrated against."""

import argparse

from evalfuse import pipeline, problemfile

EXPERTS = ["Mkt", "Fin", "Prod", "HR"]


def grid(title, rows):
    print(f"\n{title}")
    width = max(len(name) for name, _ in rows) + 2
    header = " " * width + "  ".join(f"{e:>6}" for e in EXPERTS)
    print(header)
    for name, cells in rows:
        print(f"{name:<{width}}" + "  ".join(f"{c:>6}" for c in cells))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--candidate", default=None)
    parser.add_argument("--problem", default=problemfile.fixture_path(),
                        help="problem file (defaults to the bundled example)")
    args = parser.parse_args()

    problem, name = problemfile.load_problem(args.problem)
    candidate = args.candidate or problem.candidates[0].name
    print(f"problem {name!r}, candidate {candidate!r}")
    print(f"snapshot {problemfile.problem_hash(problem, name)}")

    for diag in pipeline.validate(problem):
        print(f"  {diag.severity} [{diag.code}] {diag.location}: {diag.message}")

    qpt = pipeline.run_qpt(problem, candidate)
    crits = [c.name for c in problem.criteria]
    grid("discounted opinions (possibility of each score, per director)",
         [(c, ["".join(qpt.discounted[c][e].labels()) for e in EXPERTS])
          for c in crits])
    grid("fusion weights", [(c, [qpt.weights[c][e].label for e in EXPERTS])
                            for c in crits])
    print("\nmerged and renormalized opinions per criterion")
    for c in crits:
        print(f"  {c:<6} {''.join(qpt.merged[c].labels()):>8}"
              f"  ->  {''.join(qpt.normalized[c].labels())}")
    score_labels = problem.scale("score").labels
    print(f"\nglobal possibility over scores {score_labels}:"
          f"  {''.join(qpt.final.labels())}")
    print(f"profile match: certainty {qpt.match_certainty.label}, "
          f"possibility {qpt.match_possibility.label}")

    tbm = pipeline.run_tbm(problem, candidate)
    k = tbm.final.conflict()
    print("\nbelief engine, goodness frame")
    for s, v in sorted(tbm.final.masses.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
        if s and v / (1 - k) > 5e-4:
            lab = ",".join(score_labels[x - 1] for x in sorted(s))
            print(f"  m({{{lab}}}) = {v / (1 - k):.4f}")
    print(f"  conflict absorbed: {k:.4f}")
    print("  BetP: " + "  ".join(f"{lab}:{p:.3f}"
                                 for lab, p in zip(score_labels, tbm.betp)))
    print(f"  expected goodness score: {tbm.expected:.3f}")

    print("\none-step sensitivity: which inputs move the outcome?")
    conf = problem.scale("confidence")
    moved = []
    for crit in crits:
        for e in EXPERTS:
            cell = problem.opinion(problem.candidate(candidate), crit, e)
            idx = cell.confidence.index
            if idx + 1 < len(conf):
                target = f"gamma:{candidate}:{crit}:{e}"
                rows = pipeline.sensitivity(problem, candidate, target,
                                            [conf.labels[idx + 1]], "qpt")
                if rows[0].decision_changed:
                    moved.append(target)
    print("  confidence bumps that change the possibilistic outcome: "
          + (", ".join(moved) if moved else "none"))


if __name__ == "__main__":
    main()
