# %% [markdown]
# # Walk-forward benchmark
#
# Fit each model once on the pre-2020 closes, then forecast every test day
# from the actual closes before it.

# %%
import time

from stockbench.evaluation import build_error_report, format_report, walk_forward
from stockbench.ingest import load_series
from stockbench.models import VARIANTS, ForecasterConfig, fit_forecaster
from stockbench.series import split_at

split = split_at(load_series("data/standin/TSLA.csv"), "2020-01-01")
print(len(split.train), len(split.test))

# %%
results = []
for variant in VARIANTS:
    t0 = time.perf_counter()
    model = fit_forecaster(split.train, ForecasterConfig(variant))
    results.append(walk_forward(model, split))
    print(f"{variant:15s} {time.perf_counter() - t0:5.1f}s")

print(format_report(build_error_report(results)))

# %% [markdown]
# The fitted AR(1) coefficient is almost exactly 1 with a small intercept,
# so its forecasts barely differ from the last value.

# %%
ar = fit_forecaster(split.train, ForecasterConfig("autoregression")).model
print(ar)

# %% [markdown]
# The GBT and LSTM models predict well only inside the range of prices seen
# in training. A tree ensemble cannot output anything outside that range at
# all. Check how the test range compares before reading too much into the
# learned models' errors.

# %%
print("train", split.train.closes.min(), split.train.closes.max())
print("test ", split.test.closes.min(), split.test.closes.max())
