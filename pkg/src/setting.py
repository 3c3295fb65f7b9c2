import os
from dotenv import load_dotenv

load_dotenv()

# Project paths
PROJECT_ROOT: str = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURES_DIR: str = os.path.join(PROJECT_ROOT, "fixtures")

# Data paths
DATA_ROOT: str = os.path.join(PROJECT_ROOT, "data")
OUTPUT_DIR: str = os.getenv("POLYMMP_OUTPUT_DIR") or os.path.join(DATA_ROOT, "output")

# Logging settings
LOG_LEVEL: str = os.getenv("POLYMMP_LOG_LEVEL") or "INFO"
LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Report settings
TRACE_SCHEMA_VERSION: str = "1.0"

# Root system settings
MAX_ROOT_RANK: int = 8

# Render settings
MAX_RENDER_DIM: int = 3
RENDER_DPI: int = 96
RENDER_FORMATS: tuple = ("svg", "csv")

# Property harness settings (never affect results)
POLYMMP_SEED: int = int(os.getenv("POLYMMP_SEED") or 0)
PROPERTY_TRIALS: int = int(os.getenv("POLYMMP_PROPERTY_TRIALS") or 500)

