# %% [markdown]
# # Command-line sweeps
# The same runs through the `rfspec` entry point, written to a temp dir.

# %%
import tempfile
from pathlib import Path

from rfspec import cli
from rfspec.sweep import CorrelationGrid

out = Path(tempfile.mkdtemp())
code = cli.main(["g2tau", "--v", "200", "--gamma-f", "20", "--pair", "RR,TT", "--grid", "0:0.3:31",
                 "--out", str(out / "g2.csv")])
print("exit", code)
print((out / "g2.csv").read_text().splitlines()[:3])

# %%
code = cli.main(["spectrum", "--v", "10", "--delta", "2", "--gamma-f", "0.1", "--grid=-15:15:61",
                 "--format", "json", "--out", str(out / "s.json")])
grid = CorrelationGrid.from_json((out / "s.json").read_text())
print("exit", code, grid.shape, grid.metadata["config"]["mode"])
