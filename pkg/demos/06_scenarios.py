# coding: utf-8

# # Scenario files
#
# A scenario is a JSON file naming a matrix, the nonlinearities, gamma and
# delta, and lambda (or "auto_mid" to pick a value inside the admissible
# range). run_scenario checks the hypotheses, solves, re-certifies, and
# writes report.json and solutions.csv. The same thing is available from the
# shell:
#
#     discrete-inclusions run --scenario scenarios/tridiagonal_three.json --out out/

# In[1]:

import json
import tempfile
from pathlib import Path

from discrete_inclusions import load_scenario, run_scenario
from discrete_inclusions.scenario import resolve

here = Path(__file__).resolve().parent.parent / "scenarios"
s = load_scenario(here / "tridiagonal_three.json")
r = resolve(s)
print("admissible:", r.admissible, "chosen lambda:", r.lam)

# In[2]:

with tempfile.TemporaryDirectory() as tmp:
    code, report = run_scenario(s, tmp, seed=1)
    print("exit code", code, "claims met", report["claims_met"])
    print((Path(tmp) / "solutions.csv").read_text())
    print(json.dumps(report["hypothesis"], indent=1))
