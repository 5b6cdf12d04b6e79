from .csv_files import (
    curve_to_dataframe,
    read_curve_csv,
    read_driving_csv,
    sweep_to_dataframe,
    sweep_to_dataset,
    write_curve_csv,
    write_driving_csv,
    write_json,
    write_sweep_csv,
)
