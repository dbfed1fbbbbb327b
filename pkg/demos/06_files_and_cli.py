"""
Files and the command line
==========================
"""

# %%
import subprocess
import sys
from pathlib import Path

from wmts_quant.io import dumps, load

specs = Path(__file__).resolve().parent.parent / "specs"
email = load(specs / "email.wmts")
print(dumps(email))
print(dumps(email, "structured"))

# %%
# The same computations from a shell.
def cli(*args):
    r = subprocess.run([sys.executable, "-m", "wmts_quant", *args], capture_output=True, text=True)
    print("$ wmts-quant", " ".join(args))
    print(r.stdout + r.stderr, "exit", r.returncode)


cli("dist-modal", str(specs / "email_I3.wmts"), str(specs / "email.wmts"), "--exact")
cli("refine-check", str(specs / "email_I2.wmts"), str(specs / "email.wmts"), "--eps", "6")
cli("quotient", str(specs / "qi_S1.wmts"), str(specs / "qi_S2.wmts"))
cli("logic-eval", str(specs / "email.wmts"), "<receive[1,3]> tt")
