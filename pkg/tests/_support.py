"""Shared random generators for the test suites."""

import numpy as np

import macjam as mj


def random_user(rng, p_lo=0.1, p_hi=100.0, max_train_len=3):
    log_lo, log_hi = np.log10(p_lo), np.log10(p_hi)
    return mj.UserParams(
        train_power=float(10 ** rng.uniform(log_lo, log_hi)),
        data_power=float(10 ** rng.uniform(log_lo, log_hi)),
        train_len=int(rng.integers(1, max_train_len + 1)),
    )


def random_config(rng, k=None, kmax=4, **user_kw):
    if k is None:
        k = int(rng.integers(1, kmax + 1))
    users = tuple(random_user(rng, **user_kw) for _ in range(k))
    total_train = sum(u.train_len for u in users)
    block = int(rng.integers(total_train + 2, total_train + 120))
    return mj.SystemConfig(block, users)


def random_alloc(rng, k):
    v = rng.dirichlet(np.ones(k + 1))
    return mj.JammerAllocation(tuple(v[:-1]), float(v[-1]))


def random_budget(rng, db_lo=-10.0, db_hi=40.0):
    return mj.JammerBudget(float(10 ** rng.uniform(db_lo / 10.0, db_hi / 10.0)))
