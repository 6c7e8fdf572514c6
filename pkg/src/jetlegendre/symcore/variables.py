"""Variables and the ordered context that declares them."""

from __future__ import annotations

from dataclasses import dataclass

ROLES = ("base", "jet", "momentum", "auxiliary", "multiplier", "parameter")

# roles whose members carry jets q, q', q'', ...
DYNAMIC_ROLES = ("base", "auxiliary")


def jet_name(stem: str, order: int) -> str:
    return stem + "'" * order


def split_jet(name: str) -> tuple[str, int]:
    stem = name.rstrip("'")
    return stem, len(name) - len(stem)


@dataclass(frozen=True)
class Var:
    name: str
    role: str
    order: int = 0
    stem: str = ""
    conjugate: str | None = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        if not self.stem:
            object.__setattr__(self, "stem", split_jet(self.name)[0])
        if self.order > 0 and self.role != "jet":
            raise ValueError(f"{self.name}: positive derivative order requires role 'jet'")
        if self.role == "momentum" and not self.conjugate:
            raise ValueError(f"momentum {self.name} needs its conjugate variable")


class VariableContext:
    """Ordered, immutable collection of declared variables.

    Jets of a declared base (or auxiliary) stem are resolved on demand, so
    ``ctx["q''''"]`` works even when only ``q`` and ``q'`` were declared;
    ``max_order`` only limits what the parser accepts.
    """

    __slots__ = ("_vars", "_max_order", "_index")

    def __init__(self, variables=(), max_order=None):
        self._vars: dict[str, Var] = {}
        for v in variables:
            if v.name in self._vars:
                raise ValueError(f"duplicate variable {v.name!r}")
            self._vars[v.name] = v
        self._max_order: dict[str, int] = dict(max_order or {})
        for v in self._vars.values():
            if v.role == "jet":
                base = self._vars.get(v.stem)
                if base is None or base.role not in DYNAMIC_ROLES:
                    raise ValueError(f"jet {v.name!r} has no base stem")
                if not all(jet_name(v.stem, r) in self._vars for r in range(v.order)):
                    raise ValueError(f"jet {v.name!r} is missing lower orders")
                self._max_order[v.stem] = max(self._max_order.get(v.stem, 0), v.order)
        self._index = {name: i for i, name in enumerate(self._vars)}
        for m in self._vars.values():
            if m.role == "momentum":
                target = self._vars.get(m.conjugate)
                if target is None or target.role == "momentum":
                    raise ValueError(f"momentum {m.name!r} must be conjugate to a declared coordinate")

    # construction ---------------------------------------------------------

    def _extend(self, new_vars, max_order=None):
        mo = dict(self._max_order)
        mo.update(max_order or {})
        return VariableContext(list(self._vars.values()) + list(new_vars), mo)

    def declare(self, name, role, conjugate=None):
        return self._extend([Var(name, role, conjugate=conjugate)])

    def declare_stem(self, stem, order, role="base"):
        """Declare ``stem`` together with its jets up to ``order``."""
        vs = [Var(stem, role)]
        vs += [Var(jet_name(stem, r), "jet", r, stem) for r in range(1, order + 1)]
        return self._extend(vs, {stem: order})

    def with_jet_order(self, stem, order):
        """Return a context whose stem ``stem`` admits jets up to ``order``."""
        have = self._max_order.get(stem, 0)
        if order <= have:
            return self
        new = [Var(jet_name(stem, r), "jet", r, stem) for r in range(have + 1, order + 1)
               if jet_name(stem, r) not in self._vars]
        return self._extend(new, {stem: order})

    def merged(self, other: VariableContext):
        new = [v for v in other if v.name not in self._vars]
        mo = {s: max(o, self._max_order.get(s, 0)) for s, o in other._max_order.items()}
        return self._extend(new, mo)

    # lookup ---------------------------------------------------------------

    def __contains__(self, name):
        return self.get(name) is not None

    def __iter__(self):
        return iter(self._vars.values())

    def __len__(self):
        return len(self._vars)

    def __getitem__(self, name) -> Var:
        v = self.get(name)
        if v is None:
            raise KeyError(name)
        return v

    def get(self, name):
        v = self._vars.get(name)
        if v is not None:
            return v
        stem, order = split_jet(name)
        base = self._vars.get(stem)
        if order and base is not None and base.role in DYNAMIC_ROLES:
            return Var(name, "jet", order, stem)
        return None

    def names(self, role=None):
        return [v.name for v in self._vars.values() if role is None or v.role == role]

    def max_order(self, stem):
        return self._max_order.get(stem, 0)

    def jet(self, stem, order) -> Var:
        return self[jet_name(stem, order)]

    def role(self, name):
        v = self.get(name)
        return None if v is None else v.role

    def derivative_name(self, name):
        """Name of d/dt of variable ``name``, or None when it is time independent."""
        v = self.get(name)
        if v is None:
            return None
        if v.role == "jet" or v.role == "base":
            return jet_name(v.stem, v.order + 1)
        if v.role == "auxiliary" and self._max_order.get(v.name, 0) >= 1:
            return jet_name(v.name, 1)
        return None

    def sort_key(self, name):
        """Position used by the renderer; jets sit right after their stem."""
        stem, order = split_jet(name)
        i = self._index.get(stem)
        if i is None:
            i = self._index.get(name)
            if i is None:
                return (len(self._index), stem, order)
            return (i, "", 0)
        return (i, "", order)

    def __repr__(self):
        return f"VariableContext({list(self._vars)})"
