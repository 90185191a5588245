import json
import os

import numpy as np

TEST_DIR = os.path.dirname(os.path.abspath(__file__))

# particle positions with distinct, well separated differences
GENERIC_X3 = np.array([0.3, -1.1, 0.9])
GENERIC_P3 = np.array([0.4, 0.1, -0.7])


def random_configuration(rng, n, spread=1.0):
    """Random positions of n points with all pairwise differences above spread / 10."""
    while True:
        x = rng.uniform(-spread, spread, n)
        gaps = np.abs(x[:, None] - x[None, :])[np.triu_indices(n, 1)]
        if gaps.min() > spread / 10:
            return x


def write_config(directory, config, name="config.json"):
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / name
    path.write_text(json.dumps(config))
    return str(path)


def read_report(directory, experiment):
    with (directory / ("%s.json" % experiment)).open() as f:
        return json.load(f)
