"""Small helpers shared by the experiment scripts."""
import csv
import sys


def parse_params(text):
    """``"g=2,mu=1"`` -> ``{"g": 2.0, "mu": 1.0}``."""
    out = {}
    for item in filter(None, (t.strip() for t in text.split(","))):
        key, _, val = item.partition("=")
        out[key.strip()] = float(val)
    return out


def writer(path):
    fh = open(path, "w", newline="") if path else sys.stdout
    return fh, csv.writer(fh, lineterminator="\n")
