"""
Stores constants for the fracpme command line interface.
"""

SCHEMA_VERSION = 1

EXIT_CODES = {
    "success": 0,
    "config_error": 1,
    "solver_failure": 2,
    "validation_failure": 3,
}

OUTPUT_FORMATS = ("csv", "json")

CSV_OPTIONS = {
    "index": False,
    "float_format": "%.17g",
    "lineterminator": "\n",
    "na_rep": "",
}

LOG_FILE = "fracpme.log"
ERROR_FILE = "fracpme.err"

# values are parsed with ast.literal_eval, so strings carry their quotes
DEFAULT_RUN_PARAMETERS = {
    "general": {
        "alpha": 0.5,
        "m": 2.0,
        "grid_step": "None",
        "grid_cells": 1024,
        "picard_tol": 1e-10,
        "max_picard_iters": 500,
        "damping": 1.0,
        "n_nodes": 32,
        "max_nodes": 512,
        "shoot_tol": 1e-8,
        "method": "'bisection'",
        "extend_below_beta0": True,
        "scan_points": 0,
        "output_directory": "'fracpme_output'",
        "output_format": "'csv'",
        "jobs": 1,
        "verbose": False,
        "plot_envelopes": False,
        "record_wall_time": False,
    },
    "bounds": {
        "beta_min": "None",
        "beta_max": "None",
        "beta_points": 41,
    },
    "sweep": {
        "alphas": [0.25, 0.5, 0.75],
        "ms": [1.5, 2.0, 3.0],
    },
    "validate": {
        "oracle": False,
        "refinements": 3,
        "nx": 512,
        "nt": 2048,
        "final_time": 1.0,
        "field_every": 16,
        "front_threshold": 1e-3,
        "envelope_slack": 1e-8,
        "flux_slack": 1e-6,
        "moment_tolerance": 1e-3,
        "richardson_min_ratio": 3.0,
        "self_convergence_tolerance": 1e-4,
        "max_oracle_distance": 5e-2,
        "front_exponent_tolerance": 0.05,
    },
}
