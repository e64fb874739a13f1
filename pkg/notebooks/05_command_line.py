"""
The finsler command
===================

The same workflow from a shell. Exit status is 0 for a clean run, 1 for
bad input and 2 when equivalent characterizations disagree or a check
suite fails. Here we drive it through ``main`` so the script is
self-contained.
"""

import json
import tempfile
from pathlib import Path

from cfinsler.cli import main

out = Path(tempfile.mkdtemp()) / "report.json"

# finsler classify --zoo randers --b "z1^2,0" --samples 3 --eta-samples 3 --out report.json
code = main(["classify", "--zoo", "randers", "--b", "z1^2,0", "--samples", "3", "--eta-samples", "3",
             "--out", str(out)])
print("exit", code)
print(json.loads(out.read_text())["lattice"])

# %%
# Identity suites report the largest residual of each identity.

code = main(["check", "cartan-berwald", "--zoo", "antonelli_shimada", "--samples", "2", "--eta-samples", "2",
             "--out", str(out)])
for item in json.loads(out.read_text())["identities"]:
    print(f"{item['id']:34s} {item['max_residual']:.2e}")

# %%
# Dump every tensor at one point; the sample is z1 re, z1 im, z2 ..., eta1 ..., eta2 ...

main(["dump", "--zoo", "hermitian_nonkahler", "--sample", "0.3,0.1,-0.2,0.25,0.7,0.2,0.4,-0.3", "--out", str(out)])
doc = json.loads(out.read_text())
print(doc["conventions"])
print(sorted(doc["tensors"]))
