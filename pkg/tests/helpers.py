from toposlang.syntax import And, Comprehension, Exists, Forall, Var, substitute


def rename_bound(p, k):
    """An alpha-variant of p with every binder renamed."""
    if isinstance(p, (Exists, Forall, Comprehension)):
        new = f"r{k}"
        body = substitute(p.body, [(Var(p.var, p.var_type), Var(new, p.var_type))])
        body = rename_bound(body, k + 1)
        return Comprehension(new, p.var_type, body) if isinstance(p, Comprehension) else type(p)(new, p.var_type, body)
    if isinstance(p, And):
        return And(rename_bound(p.left, k + 10), rename_bound(p.right, k + 20))
    return p
