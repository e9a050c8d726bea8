"""Generates reference model files plus recorded decision values using
scikit-learn's libsvm-backed SVC. Run once; outputs are checked in."""
import numpy as np
from sklearn.svm import SVC

X = np.array([
    [0.9, 0.1, 0.3], [1.1, -0.2, 0.5], [0.7, 0.4, -0.1], [1.3, 0.0, 0.2],
    [0.8, -0.3, 0.6], [-0.9, 0.2, -0.4], [-1.1, -0.1, 0.1], [-0.7, 0.5, -0.6],
    [-1.2, 0.3, 0.0], [-0.8, -0.4, 0.4],
])
y = np.array([1, 1, 1, 1, 1, -1, -1, -1, -1, -1])
probes = np.array([
    [0.0, 0.0, 0.0], [1.0, 0.5, -0.5], [-0.5, -0.5, 0.5],
    [2.0, -1.0, 1.0], [0.25, 0.1, 0.05],
])

def write_model(clf, kernel_lines, path):
    # libsvm text format; positive-class support vectors first so the label
    # header "1 -1" matches the coefficient grouping
    dc = clf.dual_coef_[0]
    sv = clf.support_vectors_
    order = [i for i in range(len(dc)) if dc[i] > 0] + [i for i in range(len(dc)) if dc[i] < 0]
    npos = sum(1 for i in range(len(dc)) if dc[i] > 0)
    lines = ["svm_type c_svc"] + kernel_lines + [
        "nr_class 2",
        f"total_sv {len(dc)}",
        "rho %.17g" % (-clf.intercept_[0]),
        "label 1 -1",
        f"nr_sv {npos} {len(dc) - npos}",
        "SV",
    ]
    for i in order:
        row = "%.17g" % dc[i] + "".join(
            " %d:%.17g" % (j + 1, sv[i, j]) for j in range(sv.shape[1]) if sv[i, j] != 0.0
        )
        lines.append(row)
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")

out = {}
rbf = SVC(kernel="rbf", C=1.0, gamma=0.7).fit(X, y)
write_model(rbf, ["kernel_type rbf", "gamma %.17g" % 0.7], "reference_rbf.model")
out["rbf"] = rbf.decision_function(probes)

poly = SVC(kernel="poly", C=1.0, gamma=1.25, coef0=0.5, degree=3).fit(X, y)
write_model(poly, ["kernel_type polynomial", "degree 3", "gamma %.17g" % 1.25,
                   "coef0 %.17g" % 0.5], "reference_poly.model")
out["poly"] = poly.decision_function(probes)

for name, vals in out.items():
    print(name, "=", "{" + ", ".join("%.17g" % v for v in vals) + "}")
