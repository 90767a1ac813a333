"""Verdict table for the two Schwinger-Rabi counterexamples."""

from floquet_qa.experiments import counterexamples, format_table

COLUMNS = [
    "name",
    "theta",
    "omega",
    "traditional_ratio",
    "verdict_traditional",
    "floquet_ratio",
    "verdict_floquet",
    "delta",
    "min_overlap",
    "min_overlap_oracle",
    "adiabatic",
]

if __name__ == "__main__":
    print(format_table(counterexamples(), COLUMNS))
