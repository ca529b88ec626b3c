//! `--emit-plot-script`: a standalone matplotlib script for the CSV outputs.
//! Nothing is rendered by this tool.

pub const SCRIPT_NAME: &str = "plot.py";

pub fn plot_script(csv_files: &[&str]) -> String {
    let list = csv_files
        .iter()
        .map(|f| format!("    \"{f}\",\n"))
        .collect::<String>();
    format!(
        r#"#!/usr/bin/env python3
# Plots every numeric column of each CSV against its first column.
# Usage: python3 plot.py   (run inside the output directory)
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

FILES = [
{list}]


def numeric(v):
    try:
        return float(v)
    except ValueError:
        return None


for name in FILES:
    with open(name, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        continue
    header, body = rows[0], rows[1:]
    xs = [numeric(r[0]) for r in body]
    if any(x is None for x in xs):
        xs = list(range(len(body)))
    fig, ax = plt.subplots()
    for j, col in enumerate(header[1:], start=1):
        ys = [numeric(r[j]) for r in body]
        if all(y is not None for y in ys):
            ax.plot(xs, ys, marker="o", label=col)
    if all(x > 0 for x in xs):
        ax.set_xscale("log")
    ax.set_xlabel(header[0])
    ax.legend(fontsize="small")
    ax.set_title(name)
    out = name.rsplit(".", 1)[0] + ".png"
    fig.savefig(out, dpi=120)
    print(out, file=sys.stderr)
"#
    )
}
