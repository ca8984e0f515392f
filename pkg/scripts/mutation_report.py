"""Run every fault-injected mutant against its paired check."""

import sys

from haargroups.mutants import run_mutants


def main() -> int:
    survivors = 0
    for mutant, report in run_mutants():
        caught = report.verdict == "fail"
        survivors += not caught
        print(f"{mutant.name:<28} {report.check:<30} residual {report.max_residual:.3e}  "
              f"{'caught' if caught else 'SURVIVED'}")
    return 1 if survivors else 0


if __name__ == "__main__":
    sys.exit(main())
