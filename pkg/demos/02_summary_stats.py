# %% [markdown]
# # Summary statistics before and after 2020
#
# Split each series at the first day of 2020 and compare the two halves.

# %%
import numpy as np

from stockbench.ingest import load_series
from stockbench.series import split_at, summary_stats

TICKERS = ("MSFT", "AAPL", "TSLA", "GOOG", "AMZN", "FB")
DATA = "data/standin"  # point at "data" once the real files are there

# %%
for ticker in TICKERS:
    split = split_at(load_series(f"{DATA}/{ticker}.csv"), "2020-01-01")
    for name, part in (("train", split.train), ("test", split.test)):
        s = summary_stats(part)
        print(f"{ticker:5s} {name:5s} mean {s.mean:9.2f}  min {s.min:9.2f}  "
              f"max {s.max:9.2f}  sd {s.sd:8.2f}  n {s.count}")

# %% [markdown]
# `summary_stats` uses the population SD (divide by T). The sample SD
# (divide by T-1) differs by a factor sqrt(T/(T-1)), about 0.04% at T=1258.

# %%
n = 1258
print(np.sqrt(n / (n - 1)) - 1)
