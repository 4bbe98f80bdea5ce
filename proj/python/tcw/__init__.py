"""Python access to the tcw workbench.

Reports come back as plain dicts and lists decoded from the library's JSON.
"""

import json as _json

from . import _tcw
from ._tcw import TcwError, rainbow_atom_count

__version__ = _tcw.__version__

__all__ = [
    "TcwError",
    "axiom_soundness",
    "enumerate_topologies",
    "eval_formula",
    "exists_wins",
    "forall_script",
    "interior",
    "lemma_box",
    "modal_equivalence",
    "rainbow_atom_count",
    "rainbow_ca",
    "replay_script",
    "round_trips",
    "solve_bounded",
    "subdirect_decomposition",
    "verify_certificate",
    "witness_nonadditive",
    "witness_nontermdef",
]


def _load(text):
    return _json.loads(text)


def enumerate_topologies(size):
    """Every topology on `size` points as {"size", "opens"} dicts."""
    return _load(_tcw.enumerate_topologies(size))


def _topology_text(topology):
    return topology if isinstance(topology, str) else _json.dumps(topology)


def interior(topology, points):
    """Interior of a point set in a topology given as {"size", "opens"}."""
    return _tcw.interior(_topology_text(topology), list(points))


def eval_formula(formula, topology, valuation):
    """Points satisfying `formula`; valuation maps atom index to points."""
    return _tcw.eval_formula(formula, _topology_text(topology), {int(k): list(v) for k, v in valuation.items()})


def modal_equivalence(max_size=3, depth=3, formulas=100, seed=7):
    return _load(_tcw.modal_equivalence(max_size, depth, formulas, seed))


def axiom_soundness(samples=10000, seed=1):
    return _load(_tcw.axiom_soundness(samples, seed))


def witness_nonadditive():
    return _load(_tcw.witness_nonadditive())


def witness_nontermdef():
    return _load(_tcw.witness_nontermdef())


def lemma_box():
    return _load(_tcw.lemma_box())


def subdirect_decomposition():
    return _load(_tcw.subdirect_decomposition())


def round_trips(max_size=3):
    return _load(_tcw.round_trips(max_size))


def rainbow_ca(samples=2, seed=0):
    return _load(_tcw.rainbow_ca(samples, seed))


def forall_script(tints=(1, 2, 3, 4)):
    return _load(_tcw.forall_script(list(tints)))


def solve_bounded(n=2, u=2, nodes=5, rounds=3, mode="F"):
    """Winner and certificate for the truncated game on the full set algebra (n, u)."""
    return _load(_tcw.solve_bounded(n, u, nodes, rounds, mode))


def exists_wins(n=2, u=2, nodes=5, rounds=3, mode="F"):
    result = solve_bounded(n, u, nodes, rounds, mode)
    ok, _ = verify_certificate(result["certificate"])
    return result["winner"] == "exists" and ok


def verify_certificate(certificate):
    """(ok, detail) for a certificate dict."""
    return _tcw.verify_certificate(_json.dumps(certificate))


def replay_script(tree):
    """(ok, detail) for a script tree dict."""
    return _tcw.replay_script(_json.dumps(tree))
