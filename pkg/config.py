"""
Default configuration for the geodesic saliency toolkit.

Values here are the lowest-precedence defaults. params.yaml (or the file
named by GEOSAL_PARAMS / --params) overrides them, and command-line
flags override both.
"""

import os

# Tunneling (K_t = 30 and a 24-level color budget)
k_t = 30
sigma_d_raw = 24.0
connectivity = 8
tunnel_stride = None  # None -> max(1, floor(sigma_r / 8))
exact_tunnels = False

# Hierarchical cut
smoothing_window = 5

# Evaluation
beta2 = 0.3
mode = 'hierarchical'

# Synthetic benchmark
synth_seed = 0
synth_count = 20
sweep_k_values = [15, 30, 60]


def output_dir() -> str:
    """Default output directory; GEOSAL_OUTPUT_DIR overrides."""
    return os.environ.get('GEOSAL_OUTPUT_DIR', 'out')


def workers() -> int:
    """Default batch pool size; GEOSAL_WORKERS overrides."""
    value = os.environ.get('GEOSAL_WORKERS', '')
    try:
        return max(1, int(value)) if value else 1
    except ValueError:
        return 1


def params_file() -> str:
    """Default YAML parameter file; GEOSAL_PARAMS overrides."""
    return os.environ.get('GEOSAL_PARAMS', 'params.yaml')
