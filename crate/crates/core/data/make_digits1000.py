# Regenerates digits1000.csv from scikit-learn's bundled copy of the UCI
# optical digits set: 1000 rows sampled with seed 0, the 60 highest-variance
# pixel columns kept, label in the last column.
import numpy as np
from sklearn.datasets import load_digits

d = load_digits()
X, y = d.data, d.target
rng = np.random.RandomState(0)
idx = np.sort(rng.choice(len(y), 1000, replace=False))
X, y = X[idx], y[idx]
keep = np.sort(np.argsort(-X.var(axis=0), kind="stable")[:60])
X = X[:, keep]
with open("digits1000.csv", "w") as f:
    for row, lab in zip(X.astype(int), y):
        f.write(",".join(map(str, row)) + "," + str(lab) + "\n")
