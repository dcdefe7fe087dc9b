"""Weather-to-power regression toolkit.

The numerics live in the _weatherwatt extension; this package decodes
its JSON payloads into plain dicts and re-exports the scalar helpers.
"""

import json

try:
    from . import _weatherwatt as _core  # packaged layout: extension inside the package
except ImportError:
    import _weatherwatt as _core  # dev layout: extension on sys.path from the build tree

WwError = _core.WwError
WwIngestError = _core.WwIngestError
WwConfigError = _core.WwConfigError

t_cdf = _core.t_cdf
pearson_r = _core.pearson_r
r_squared = _core.r_squared
solve_normal = _core.solve_normal
predict = _core.predict
lag_scan = _core.lag_scan
generate_default_csv = _core.generate_default_csv
generate_csv_from_spec = _core.generate_csv_from_spec


def fit(feature_names, feature_rows, y):
    """OLS with per-coefficient inference. Returns the model dict."""
    return json.loads(_core.fit_json(feature_names, feature_rows, y))


def backward_eliminate(feature_names, feature_rows, y, sl=0.05):
    """Backward elimination at significance level sl. Returns the trace dict."""
    return json.loads(_core.backward_eliminate_json(feature_names, feature_rows, y, sl))


def run_experiment(config_path):
    """Full pipeline from a config file. Returns the forecast report dict."""
    return json.loads(_core.run_experiment_json(config_path))


__all__ = [
    "WwError",
    "WwIngestError",
    "WwConfigError",
    "t_cdf",
    "pearson_r",
    "r_squared",
    "solve_normal",
    "predict",
    "lag_scan",
    "generate_default_csv",
    "generate_csv_from_spec",
    "fit",
    "backward_eliminate",
    "run_experiment",
]
