"""
Construction trees for moduli

Every bound built by the calculus carries a Provenance naming the rule that
built it, the scalar parameters it was given and the child moduli it was
composed from. Trees serialize to JSON and can be rebuilt into live moduli
through the rule registry, which is how reports reproduce their bounds.
"""
from dataclasses import dataclass, field
import logging

logger = logging.getLogger(__name__)

# rule name -> (builder, tag)
RULES = {}


def rule(name, tag):
    """Register a builder so trees naming ``name`` can be rebuilt.

    Builders are called with their scalar params and their children (already
    rebuilt) as keyword arguments, so child roles must match argument names.
    """
    def decorator(builder):
        RULES[name] = (builder, tag)
        return builder
    return decorator


def tag_for(name):
    entry = RULES.get(name)
    return entry[1] if entry else ""


@dataclass(frozen=True)
class Provenance:
    """One node of a construction tree"""

    rule: str
    params: dict = field(default_factory=dict)
    children: tuple = ()  # ((role, Provenance), ...)
    label: str = ""
    notes: tuple = ()

    @property
    def tag(self):
        return tag_for(self.rule)

    @property
    def rebuildable(self):
        if self.rule not in RULES:
            return False
        return all(child.rebuildable for _, child in self.children)

    def child(self, role):
        for name, node in self.children:
            if name == role:
                return node
        raise KeyError(role)

    def walk(self):
        """Yield every node of the tree, depth first, root first"""
        yield self
        for _, node in self.children:
            yield from node.walk()

    def to_dict(self):
        from .serializers import ProvenanceSerializer
        return ProvenanceSerializer(self).data

    def render(self, indent=0, role=None):
        """Indented text view used by the explain command"""
        pad = "  " * indent
        head = f"{role}: " if role else ""
        label = f"{self.label} = " if self.label else ""
        params = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        line = f"{pad}{head}{label}{self.rule}({params})"
        if self.tag:
            line += f"  [{self.tag}]"
        lines = [line]
        for note in self.notes:
            lines.append(f"{pad}  ! {note}")
        for child_role, node in self.children:
            lines.append(node.render(indent + 1, child_role))
        return "\n".join(lines)


def from_dict(data):
    """Inverse of Provenance.to_dict"""
    return Provenance(
        rule=data["rule"],
        params=dict(data.get("params") or {}),
        children=tuple(
            (entry["role"], from_dict(entry["tree"])) for entry in data.get("children") or []
        ),
        label=data.get("label", ""),
        notes=tuple(data.get("notes") or ()),
    )


def rebuild(tree):
    """Reconstruct a live modulus from a Provenance or its dict form"""
    if isinstance(tree, dict):
        tree = from_dict(tree)
    if tree.rule not in RULES:
        raise KeyError(f"rule '{tree.rule}' cannot be rebuilt")

    builder, _ = RULES[tree.rule]
    kwargs = dict(tree.params)
    for role, node in tree.children:
        kwargs[role] = rebuild(node)
    rebuilt = builder(**kwargs)
    if tree.label:
        rebuilt = rebuilt.labelled(tree.label)
    logger.debug(f"Rebuilt {tree.rule} from its provenance tree")
    return rebuilt
