# Pareto dominance, archives, and front-quality metrics on toy data.
#
# Run: python demos/01_pareto_basics.py

import numpy as np

from mobo import (
    Evaluation,
    ParetoArchive,
    dominates,
    hypervolume,
    pareto_filter,
    phv_difference,
    r2_distance,
)

# Minimization everywhere: (1, 2) dominates (2, 3), equals never dominate.
print("dominates((1,2), (2,3)) =", dominates(np.array([1.0, 2.0]), np.array([2.0, 3.0])))
print("dominates((1,2), (1,2)) =", dominates(np.array([1.0, 2.0]), np.array([1.0, 2.0])))

# The non-dominated subset of a small cloud.
cloud = np.array([[1, 3], [2, 2], [3, 1], [2, 3], [3, 3]], dtype=float)
print("\ncloud:\n", cloud)
print("pareto_filter:\n", pareto_filter(cloud))

# An archive ingests evaluations one by one and keeps the running front.
archive = ParetoArchive()
rng = np.random.default_rng(0)
for i in range(200):
    y = rng.random(2) * 4
    archive.insert(Evaluation(input=rng.random(2), output=y, iteration=i))
print("\narchive size after 200 random inserts:", len(archive))

# Hypervolume: the area dominated by the front up to a reference point.
front = np.array([[1.0, 2.0], [2.0, 1.0]])
ref = np.array([3.0, 3.0])
print("\nhypervolume({(1,2),(2,1)}, ref=(3,3)) =", hypervolume(front, ref))

# Against a denser 'ideal' front, the difference and the mean-distance
# indicator both shrink as the estimate improves.
f1 = np.linspace(0, 1, 200)
ideal = np.column_stack((f1, 1 - np.sqrt(f1)))
rough = ideal[::40] + 0.05
ref = np.array([2.0, 2.0])
print("\nphv difference (rough estimate):", round(phv_difference(rough, ideal, ref), 4))
print("r2 distance   (rough estimate):", round(r2_distance(rough, ideal), 4))
print("phv difference (exact front):  ", phv_difference(ideal, ideal, ref))
