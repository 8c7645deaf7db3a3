import os
from pathlib import Path

DATA_DIR = str(Path(__file__).resolve().parent / 'data')

# report presentation
DECIMALS = int(os.environ.get('CHIPLCA_DECIMALS', 2))

# sweep points evaluated concurrently
SWEEP_WORKERS = int(os.environ.get('CHIPLCA_SWEEP_WORKERS', 4))

# monte-carlo trials per derived random stream; part of the seeded result
MC_STREAM_TRIALS = 4096
MC_TRIALS = 10000

# julian year
HOURS_PER_YEAR = 8766.0

# packaging energy, kWh per cm^2 of silicon
ASSEMBLY_COEFFICIENT = 0.34

CALIBRATION_TOL = 1e-9
CALIBRATION_MAX_ITER = 400

SCHEMA_VERSION = 1

INVENTORY_HEADER = ('index', 'name', 'category', 'energy_kwh', 'materials')

WH_PER_KWH = 1000.0
MM2_PER_CM2 = 100.0
