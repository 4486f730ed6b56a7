"""Write the Wisconsin diagnostic breast cancer table as a CSV for the CLI.

Malignant rows get label +1 and benign rows -1.
"""
import csv
import sys

from sklearn.datasets import load_breast_cancer


def main(path):
    data = load_breast_cancer()
    names = [n.replace(" ", "_") for n in data.feature_names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names + ["label"])
        for row, target in zip(data.data, data.target):
            w.writerow([repr(float(v)) for v in row] + ["+1" if target == 0 else "-1"])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "wdbc.csv")
