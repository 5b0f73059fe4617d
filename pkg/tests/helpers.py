"""Random instances with named predicates, so lists can be re-evaluated from raw bits."""

import numpy as np

from fallrule import _bits
from fallrule.data import BinaryDataset
from fallrule.exceptions import ZeroCapture
from fallrule.mining import Antecedent
from fallrule.rulelist import close, empty_prefix, extend


def make_dataset(labels) -> BinaryDataset:
    y = np.asarray(labels, dtype=bool)
    return BinaryDataset.from_matrix(np.zeros((len(y), 0)), y)


def make_antecedent(dataset: BinaryDataset, rows, name: str) -> Antecedent:
    mask = np.zeros(dataset.n, dtype=bool)
    mask[list(rows)] = True
    return Antecedent.from_bits(_bits.from_bool(mask), dataset.labels, name)


def random_matrix_dataset(rng, n, k):
    y = rng.random(n) < rng.uniform(0.2, 0.8)
    y[0], y[-1] = True, False
    X = rng.random((n, k)) < rng.uniform(0.1, 0.6, k)
    return BinaryDataset.from_matrix(X, y)


def single_antecedents(ds):
    return [Antecedent.from_predicates(ds, [j]) for j in range(len(ds.predicates)) if ds.predicate_bits[j]]


def random_prefix(rng, ds, ants, w, max_len):
    """A random prefix built by extending while the pick captures something."""
    state = empty_prefix(ds, w)
    for l in rng.permutation(len(ants))[: int(rng.integers(0, max_len + 1))]:
        try:
            state = extend(state, ants[l], int(l))
        except ZeroCapture:
            continue
    return state


def random_compatible_list(rng, ds, ants, max_len=5):
    return close(random_prefix(rng, ds, ants, 1, max_len))


def g_grid_min(tilde_pos, n, C, C1, zeta, min_alpha, step=1e-6):
    """Minimum of the one-more-rule cost over a dense grid on [zeta, 1]."""
    beta = np.append(np.arange(zeta, 1.0, step), 1.0)
    r = tilde_pos / n
    if r > 0:
        beta = beta[beta > 0]
        with np.errstate(over="ignore"):  # subnormal zeta; those points are never the minimum
            cost = (1.0 / beta - 1.0) * r
    else:
        cost = np.zeros_like(beta)
    return float(np.min(cost + C + C1 * (beta - min_alpha)))
