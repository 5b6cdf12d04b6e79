from pathlib import Path

import pandas as pd

FP_COLUMNS_DF = Path(__file__).parent / "column_metainfo.csv"

COLUMNS_DF = pd.read_csv(FP_COLUMNS_DF)

COLUMN_UNITS = dict(zip(COLUMNS_DF["name"], COLUMNS_DF["unit"].astype(str)))
COLUMN_LONG_NAMES = dict(zip(COLUMNS_DF["name"], COLUMNS_DF["description"]))
