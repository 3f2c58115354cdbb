# Fit a GP surrogate, query its posterior, and draw Thompson sample paths.
#
# Run: python demos/02_gp_surrogate.py          (prints numbers)
#      python demos/02_gp_surrogate.py --plot   (also writes gp_demo.svg)

import sys

import numpy as np

from mobo import SeKernelParams, draw_sample_path, fit, predict, refit_hyperparameters
from mobo.gp import denormalize_mean


def truth(x):
    return np.sin(6 * x) + 0.3 * x


rng = np.random.default_rng(4)
X = rng.random((9, 1))
y = truth(X[:, 0])

# Fit with a rough guess, then let marginal likelihood pick hyperparameters.
start = SeKernelParams(signal_variance=1.0, lengthscales=np.array([0.5]),
                       noise_variance=1e-6)
model = fit(X, y, start)
model = refit_hyperparameters(model, rng, lengthscale_span=np.array([1.0]))
print("estimated lengthscale:", round(float(model.kernel.lengthscales[0]), 3))
print("estimated signal var: ", round(model.kernel.signal_variance, 3))

grid = np.linspace(0, 1, 201)[:, None]
mean, std = predict(model, grid)  # normalized space
raw_mean = denormalize_mean(model, mean)
err = np.abs(raw_mean - truth(grid[:, 0]))
print("max |posterior mean - truth| on [0,1]:", round(float(err.max()), 4))
print("max posterior stddev (normalized):   ", round(float(std.max()), 4))

# Posterior sample paths are fixed functions: cheap to evaluate anywhere,
# and they agree with the data at the training points.
paths = [draw_sample_path(model, m=500, rng=seed) for seed in range(3)]
at_train = np.stack([p(X) for p in paths])
print("paths at first training point (normalized):",
      np.round(at_train[:, 0], 3), "target:", round(float(model.train_targets[0]), 3))

if "--plot" in sys.argv:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    sd_raw = std * model.normalizer[1]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(grid[:, 0], truth(grid[:, 0]), "k--", label="truth")
    ax.plot(grid[:, 0], raw_mean, label="posterior mean")
    ax.fill_between(grid[:, 0], raw_mean - 2 * sd_raw, raw_mean + 2 * sd_raw, alpha=0.2)
    for i, p in enumerate(paths):
        ax.plot(grid[:, 0], denormalize_mean(model, p(grid)), lw=0.8,
                label=f"sample path {i}" if i == 0 else None)
    ax.plot(X[:, 0], y, "ko", ms=5)
    ax.legend()
    fig.tight_layout()
    fig.savefig("gp_demo.svg")
    print("wrote gp_demo.svg")
