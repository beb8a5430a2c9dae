# Import all command modules so __init_subclass__ auto-registers them
from . import (  # noqa: F401
    benchmark_command,
    fit_command,
    predict_command,
    simulate_command,
    version_command,
    weights_command,
)
