# %% [markdown]
# # How much does today's close say about tomorrow's?
#
# Lag pairs (y_t, y_{t+k}) and the lag-k autocorrelation r_k.

# %%
from stockbench.ingest import load_series
from stockbench.series import autocorrelation, lag_pairs

msft = load_series("data/standin/MSFT.csv")

# %%
for k in (1, 5, 20, 60, 250):
    print(f"r_{k:<3d} = {autocorrelation(msft, k):.4f}")

# %% [markdown]
# r_1 sits close to 1 for any price series that wanders slowly, which is why
# the last observed value is such a hard baseline to beat.

# %%
pairs = lag_pairs(msft, 1)
print(len(pairs), pairs.pairs[:3])

# %% [markdown]
# matplotlib is not a dependency; if it is installed, the scatter is one call.

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    plt.scatter(pairs.y_t, pairs.y_t_plus_k, s=2)
    plt.xlabel("y_t")
    plt.ylabel("y_t+1")
    plt.savefig("demo_out/lag_MSFT_k1.png", dpi=120)
