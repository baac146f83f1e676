# %% [markdown]
# # Stand-in price files
#
# The benchmark reads one Yahoo-style OHLCV file per ticker. When the real
# files are not at hand, `stockbench.standin` writes synthetic ones on the
# NYSE calendar so that every step below can still run end to end.

# %%
from pathlib import Path

from stockbench.ingest import load_series, validate
from stockbench.standin import nyse_trading_days, write_standin_fixtures

out = Path("demo_out/standin")
paths = write_standin_fixtures(out)
[p.name for p in paths]

# %% [markdown]
# The calendar skips weekends, exchange holidays and the 2018-12-05 closure.

# %%
days = nyse_trading_days("2015-01-01", "2021-04-30")
print(len(days), days[0], days[-1])

# %% [markdown]
# Each file parses cleanly and raises no jump or gap warnings.

# %%
for path in paths:
    s = load_series(path)
    print(s.ticker, len(s), s.closes[0].round(2), s.closes[-1].round(2), validate(s))
