"""Independent reference evaluator: truth of a formula under one assignment."""
from itertools import product

from posmodel.syntax import And, App, Bot, Eq, Exists, Or, Rel, Top, Var


def term(M, t, env):
    if isinstance(t, Var):
        return env[t.name]
    args = tuple(term(M, a, env) for a in t.args)
    return M.funcs[t.fn][args]


def holds(M, f, env):
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Eq):
        return term(M, f.left, env) == term(M, f.right, env)
    if isinstance(f, Rel):
        return tuple(term(M, a, env) for a in f.args) in M.rels[f.name]
    if isinstance(f, And):
        return holds(M, f.left, env) and holds(M, f.right, env)
    if isinstance(f, Or):
        return holds(M, f.left, env) or holds(M, f.right, env)
    if isinstance(f, Exists):
        return any(holds(M, f.body, {**env, f.var: e}) for e in range(M.size(f.sort)))
    raise TypeError(f)


def truth_table(M, f, ctx):
    ctx = tuple(ctx)
    return frozenset(t for t in product(*[range(M.size(s)) for _, s in ctx])
                     if holds(M, f, dict(zip([v for v, _ in ctx], t))))
