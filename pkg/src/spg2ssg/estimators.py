"""scikit-learn style wrappers.

Games are not feature matrices, so only the parameter handling and the
fit/transform/predict vocabulary are borrowed: ``X`` is a ``(arena, objective)``
pair or a :class:`~spg2ssg.game.Game`.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin

from .game import Game, check_game, max_denominator
from .reduction import AlphaSchedule, bounds_report, default_alpha, reduce
from .solvers import oracle_values, strategy_iteration, value_iteration

__all__ = ["GadgetReduction", "StochasticGameSolver"]


def _unpack(X):
    if isinstance(X, Game):
        return X.arena, X.objective
    arena, objective = X
    return arena, objective


class GadgetReduction(TransformerMixin, BaseEstimator):
    """Reduce a parity game to a reachability game.

    Parameters
    ----------
    alpha : "default" or AlphaSchedule
        With ``"default"`` the schedule is derived from the fitted game's size
        and largest probability denominator.
    """

    def __init__(self, alpha="default"):
        self.alpha = alpha

    def fit(self, X, y=None):
        arena, objective = _unpack(X)
        check_game(arena, objective)
        if isinstance(self.alpha, AlphaSchedule):
            self.alpha_ = self.alpha
        elif self.alpha == "default":
            self.alpha_ = default_alpha(arena.n, max_denominator(arena))
        else:
            raise ValueError(f"alpha must be 'default' or an AlphaSchedule, got {self.alpha!r}")
        try:
            self.bounds_ = bounds_report(arena)
        except ValueError:
            self.bounds_ = None
        return self

    def transform(self, X):
        if not hasattr(self, "alpha_"):
            raise AttributeError("GadgetReduction is not fitted yet; call fit first")
        arena, objective = _unpack(X)
        return reduce(arena, objective, self.alpha_)


class StochasticGameSolver(BaseEstimator):
    """Solve a game; ``predict`` returns values at the requested vertices.

    Parameters
    ----------
    method : {"si", "vi", "oracle"}
    tol : float
        Value iteration stopping threshold.
    max_iter : int
        Value iteration sweep limit.
    """

    def __init__(self, method="si", tol=1e-12, max_iter=1_000_000):
        self.method = method
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        arena, objective = _unpack(X)
        if self.method == "si":
            res = strategy_iteration(arena, objective)
        elif self.method == "vi":
            res = value_iteration(arena, objective, tol=self.tol, max_iters=self.max_iter)
        elif self.method == "oracle":
            res = oracle_values(arena, objective)
        else:
            raise ValueError(f"unknown method {self.method!r}")
        self.result_ = res
        self.values_ = res.values
        self.eve_strategy_ = res.eve_strategy
        self.adam_strategy_ = res.adam_strategy
        return self

    def predict(self, vertices=None):
        if not hasattr(self, "values_"):
            raise AttributeError("StochasticGameSolver is not fitted yet; call fit first")
        if vertices is None:
            return list(self.values_)
        return [self.values_[v] for v in vertices]
