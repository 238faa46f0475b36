"""
Symbolic reference architecture.

Atoms carry stipulated role sets; definitional rules are closed by naive forward
chaining; composites combine role sets by typed union (`conj`) or by attribute
tagging (`modify`). The encoder is the identity on token strings, so edit
perturbations act directly on spelling.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from schemas.documents import AtomEntry, ConstructorEntry, RuleBaseDocument, RuleEntry
from schemas.meanings import BOTTOM, BottomMeaning, RoleMeaning
from schemas.terms import Atom, Constructor, Term
from semantics.algebra import IntendedInterpretation, SemanticAlgebra, TypedGrammar
from semantics.errors import ConfigError, InconsistentClosure, MalformedCommand, UndefinedAtom
from semantics.spaces import PseudometricSpace
from utils.logger import logger

from .base import (
    GroundingArchitecture,
    Locus,
    Mechanism,
    Perturbation,
    ProvenanceRecord,
    ThreatModel,
    identity_alignment,
)

RULE_CLOSURE = "rule-closure"
STIPULATED_LOOKUP = "stipulated-lookup"

# marks a token the encoder did not resolve
_UNRESOLVED = "?"

_EDIT_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


# role literals

def negate(literal: str) -> str:
    return literal[1:] if literal.startswith("~") else "~" + literal


def check_consistent(roles: Iterable[str]) -> FrozenSet[str]:
    """Raise InconsistentClosure when a literal and its negation co-occur."""
    roles = frozenset(roles)
    for lit in sorted(roles):
        if not lit.startswith("~") and negate(lit) in roles:
            raise InconsistentClosure(lit)
    return roles


def tag_attribute(literal: str) -> str:
    """Qualify an untyped literal with the ATTR type; typed literals pass through."""
    body = literal[1:] if literal.startswith("~") else literal
    if ":" in body:
        return literal
    return ("~" if literal.startswith("~") else "") + "ATTR:" + body


# rule base

class RuleBase:
    """Atoms with stipulated role sets plus acyclic definitional rules."""

    def __init__(
        self,
        atoms: Sequence[AtomEntry],
        rules: Sequence[RuleEntry] = (),
        constructors: Sequence[ConstructorEntry] = (),
    ) -> None:
        self.sorts: Dict[str, str] = {}
        self.base_roles: Dict[str, FrozenSet[str]] = {}
        for entry in atoms:
            if entry.name in self.sorts:
                raise ConfigError(f"duplicate atom {entry.name!r} in rule base")
            self.sorts[entry.name] = entry.sort
            self.base_roles[entry.name] = check_consistent(entry.roles)
        self.rules: List[Tuple[str, str]] = []
        for rule in rules:
            for ref in (rule.premise, rule.conclusion):
                if ref not in self.sorts:
                    raise ConfigError(f"rule references undeclared atom {ref!r}")
            self.rules.append((rule.premise, rule.conclusion))
        self._check_acyclic()
        self.constructors: Dict[str, ConstructorEntry] = {c.name: c for c in constructors}
        self._closures: Dict[str, FrozenSet[str]] = {}

    def _check_acyclic(self) -> None:
        graph: Dict[str, List[str]] = {}
        for premise, conclusion in self.rules:
            graph.setdefault(premise, []).append(conclusion)
        state: Dict[str, int] = {}

        def visit(node: str, path: Tuple[str, ...]) -> None:
            if state.get(node) == 1:
                raise ConfigError(f"cyclic definitions: {' -> '.join(path + (node,))}")
            if state.get(node) == 2:
                return
            state[node] = 1
            for nxt in graph.get(node, []):
                visit(nxt, path + (node,))
            state[node] = 2

        for node in sorted(graph):
            visit(node, ())

    def __contains__(self, name: str) -> bool:
        return name in self.sorts

    def atoms(self) -> List[Atom]:
        return [Atom(name=n, sort=s) for n, s in self.sorts.items()]

    def closed_roles(self, name: str) -> FrozenSet[str]:
        """Cached role set of closure(self, name)."""
        if name not in self._closures:
            self._closures[name] = closure(self, name).as_set()
        return self._closures[name]

    @classmethod
    def from_document(cls, doc: RuleBaseDocument) -> "RuleBase":
        return cls(doc.atoms, doc.rules, doc.constructors)

    def to_document(self) -> RuleBaseDocument:
        return RuleBaseDocument(
            atoms=[AtomEntry(name=n, sort=s, roles=sorted(self.base_roles[n])) for n, s in self.sorts.items()],
            rules=[RuleEntry(premise=p, conclusion=c) for p, c in self.rules],
            constructors=list(self.constructors.values()),
        )


def closure(kb: RuleBase, name: str) -> RoleMeaning:
    """Least fixed point of rule application from the atom's stipulated roles."""
    if name not in kb:
        raise UndefinedAtom(name)
    reached: Set[str] = {name}
    changed = True
    while changed:
        changed = False
        for premise, conclusion in kb.rules:
            if premise in reached and conclusion not in reached:
                reached.add(conclusion)
                changed = True
    roles: Set[str] = set()
    for concept in sorted(reached):
        roles |= kb.base_roles[concept]
    return RoleMeaning.of(check_consistent(roles))


RoleLike = Union[RoleMeaning, BottomMeaning]


def compose_roles(left: RoleLike, right: RoleLike, constructor: str) -> RoleLike:
    """conj: typed union; modify: union after tagging the (left) attribute's literals."""
    if isinstance(left, BottomMeaning) or isinstance(right, BottomMeaning):
        return BOTTOM
    lhs = left.as_set()
    if constructor == "modify":
        lhs = frozenset(tag_attribute(lit) for lit in lhs)
    elif constructor != "conj":
        raise ValueError(f"unknown role constructor {constructor!r}")
    return RoleMeaning.of(check_consistent(lhs | right.as_set()))


def role_distance(a: RoleLike, b: RoleLike) -> float:
    """|a Δ b| / |a ∪ b|; 0/0 is 0; bottom is at distance 1 from every role set."""
    a_bottom = isinstance(a, BottomMeaning)
    b_bottom = isinstance(b, BottomMeaning)
    if a_bottom or b_bottom:
        return 0.0 if a_bottom and b_bottom else 1.0
    sa, sb = a.as_set(), b.as_set()
    union = sa | sb
    if not union:
        return 0.0
    return len(sa ^ sb) / len(union)


class RoleSetSpace(PseudometricSpace):
    name = "roles"

    def distance(self, a, b) -> float:
        return role_distance(a, b)

    def contains(self, point) -> bool:
        return isinstance(point, (RoleMeaning, BottomMeaning))


def levenshtein(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


class EditDistanceSpace(PseudometricSpace):
    """Token sequences compared by character edit distance of their joined form."""

    name = "edit"

    def distance(self, a, b) -> float:
        return float(levenshtein(" ".join(a), " ".join(b)))

    def contains(self, point) -> bool:
        return isinstance(point, tuple) and all(isinstance(t, str) for t in point)


# perturbations

def _substitute(chars: List[str], pos: int, rng: np.random.Generator) -> None:
    options = [c for c in _EDIT_ALPHABET if c != chars[pos]]
    chars[pos] = options[int(rng.integers(len(options)))]


def edit_perturbation(token: str, n: int, rng: np.random.Generator) -> str:
    """Apply n single-character substitutions at distinct positions (capped at the token length)."""
    if n < 0:
        raise ValueError("edit count must be >= 0")
    chars = list(token)
    if not chars or n == 0:
        return token
    for pos in rng.choice(len(chars), size=min(n, len(chars)), replace=False):
        _substitute(chars, int(pos), rng)
    return "".join(chars)


def _edit_sequence(tokens: Tuple[str, ...], n: int, rng: np.random.Generator) -> Tuple[str, ...]:
    """n substitutions at distinct (token, position) slots across the sequence."""
    out = [list(tok) for tok in tokens]
    slots = [(i, pos) for i, tok in enumerate(out) for pos in range(len(tok))]
    if not slots or n == 0:
        return tuple(tokens)
    for k in rng.choice(len(slots), size=min(n, len(slots)), replace=False):
        i, pos = slots[int(k)]
        _substitute(out[i], pos, rng)
    return tuple("".join(chars) for chars in out)


def edit_threat() -> ThreatModel:
    """Character substitutions; scale eps admits floor(eps) edits."""

    def draw(rep: Tuple[str, ...], scale: float, rng: np.random.Generator) -> Perturbation:
        n = int(np.floor(scale))
        if n == 0 or not rep:
            return Perturbation("edit", scale, lambda r: r, label="0 edits")
        perturbed = _edit_sequence(tuple(rep), n, rng)
        return Perturbation("edit", scale, lambda r, p=perturbed: p, label=f"{n} edits")

    def enumerate_edits(rep: Tuple[str, ...], scale: float) -> List[Perturbation]:
        # every single substitution; larger budgets are sampled with draw()
        if scale < 1:
            return []
        out: List[Perturbation] = []
        for i, tok in enumerate(rep):
            for pos, ch in enumerate(tok):
                for sub in _EDIT_ALPHABET:
                    if sub == ch:
                        continue
                    edited = tok[:pos] + sub + tok[pos + 1:]
                    seq = tuple(rep[:i]) + (edited,) + tuple(rep[i + 1:])
                    out.append(Perturbation("edit", 1.0, lambda r, s=seq: s, label=" ".join(seq)))
        return out

    return ThreatModel("edit", draw, enumerate_edits)


# default knowledge base

def default_rule_base() -> RuleBase:
    atoms = [
        AtomEntry(name="bachelor", sort="PREDICATE", roles=[]),
        AtomEntry(name="man", sort="PREDICATE", roles=["HUMAN", "MALE"]),
        AtomEntry(name="unmarried", sort="PREDICATE", roles=["~MARRIED"]),
        AtomEntry(name="dragon", sort="PREDICATE", roles=["TYPE:DRAGON"]),
        AtomEntry(name="cat", sort="PREDICATE", roles=["TYPE:CAT"]),
        AtomEntry(name="car", sort="PREDICATE", roles=["TYPE:CAR"]),
        AtomEntry(name="dog", sort="PREDICATE", roles=["TYPE:DOG"]),
        AtomEntry(name="red", sort="ATTRIBUTE", roles=["COLOR:RED"]),
        AtomEntry(name="blue", sort="ATTRIBUTE", roles=["COLOR:BLUE"]),
    ]
    rules = [
        RuleEntry(premise="bachelor", conclusion="man"),
        RuleEntry(premise="bachelor", conclusion="unmarried"),
    ]
    constructors = [
        ConstructorEntry(name="conj", arg_sorts=("PREDICATE", "PREDICATE"), result_sort="PREDICATE", op="conj"),
        ConstructorEntry(name="modify", arg_sorts=("ATTRIBUTE", "PREDICATE"), result_sort="PREDICATE", op="modify"),
    ]
    return RuleBase(atoms, rules, constructors)


def load_rule_base(path: Union[str, Path]) -> RuleBase:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"rule file not found: {path}")
    try:
        doc = RuleBaseDocument.model_validate_json(path.read_text(encoding="utf-8"))
    except ValueError as e:
        raise ConfigError(f"invalid rule file {path}: {e}") from e
    logger.info(f"[SymbolicRef] loaded {len(doc.atoms)} atoms and {len(doc.rules)} rules from {path}")
    return RuleBase.from_document(doc)


def save_rule_base(kb: RuleBase, path: Union[str, Path]) -> None:
    payload = kb.to_document().model_dump(mode="json")
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


# grammar, algebra, interpretation

def rule_grammar(kb: RuleBase) -> TypedGrammar:
    constructors = [
        Constructor(name=c.name, arg_sorts=tuple(c.arg_sorts), result_sort=c.result_sort)
        for c in kb.constructors.values()
    ]
    return TypedGrammar(kb.atoms(), constructors)


def role_algebra(kb: RuleBase, grammar: Optional[TypedGrammar] = None) -> SemanticAlgebra:
    grammar = grammar or rule_grammar(kb)
    ops = {
        name: (lambda args, op=entry.op: compose_roles(args[0], args[1], op))
        for name, entry in kb.constructors.items()
    }
    return SemanticAlgebra(grammar, RoleSetSpace(), ops)


def stipulated_interpretation(kb: RuleBase, algebra: Optional[SemanticAlgebra] = None) -> IntendedInterpretation:
    """I(atom) = closure of the atom's stipulated roles."""
    algebra = algebra or role_algebra(kb)
    table = {name: closure(kb, name) for name in kb.sorts}
    return IntendedInterpretation(algebra, table)


class SymbolicArchitecture(GroundingArchitecture):
    """Stipulated lookup + rule closure; open vocabulary (unknown tokens mean bottom)."""

    def __init__(self, kb: RuleBase) -> None:
        self.kb = kb
        self.grammar = rule_grammar(kb)
        self.algebra = role_algebra(kb, self.grammar)
        mechanisms = [
            Mechanism(id=STIPULATED_LOOKUP, locus=Locus.ENCODE,
                      description="resolve tokens against the stipulated symbol table"),
            Mechanism(id=RULE_CLOSURE, locus=Locus.CONCEPTUALIZE,
                      description="close role sets under definitional rules"),
        ]
        provenance = ProvenanceRecord(
            g0_level="weak",
            training_process=None,
            acquired_components=[],
            alignment_external=False,
            notes=["symbol table and rules are stipulated by the designer; no acquisition history"],
        )
        super().__init__(
            name="symbolic-ref",
            alphabet=kb.sorts.keys(),
            encode=self._encode_tokens,
            conceptualize=self._conceptualize_tokens,
            align=identity_alignment,
            representation_space=EditDistanceSpace(),
            meaning_space=RoleSetSpace(),
            mechanisms=mechanisms,
            provenance=provenance,
            mode="symbolic",
            open_vocabulary=True,
        )

    def _encode_tokens(self, tokens: Tuple[str, ...], active: FrozenSet[str]) -> Tuple[str, ...]:
        if STIPULATED_LOOKUP in active:
            return tuple(tokens)
        return tuple(_UNRESOLVED + t for t in tokens)

    def _roles(self, token: str, active: FrozenSet[str]) -> Optional[FrozenSet[str]]:
        if token not in self.kb:
            return None
        if RULE_CLOSURE in active:
            return self.kb.closed_roles(token)
        return self.kb.base_roles[token]

    def _conceptualize_tokens(self, rep: Tuple[str, ...], active: FrozenSet[str]) -> RoleLike:
        if not rep:
            return BOTTOM
        parts: List[FrozenSet[str]] = []
        for token in rep:
            roles = self._roles(token, active)
            if roles is None:
                return BOTTOM
            # attributes only occur as modifiers inside composites
            if len(rep) > 1 and self.kb.sorts[token] == "ATTRIBUTE":
                roles = frozenset(tag_attribute(lit) for lit in roles)
            parts.append(roles)
        try:
            return RoleMeaning.of(check_consistent(frozenset().union(*parts)))
        except InconsistentClosure:
            logger.warning(f"[SymbolicRef] clashing roles for {' '.join(rep)!r}; meaning is bottom")
            return BOTTOM

    def threat_model(self) -> ThreatModel:
        return edit_threat()


def build_symbolic_architecture(kb: Optional[RuleBase] = None) -> Tuple[SymbolicArchitecture, IntendedInterpretation]:
    kb = kb or default_rule_base()
    arch = SymbolicArchitecture(kb)
    interp = stipulated_interpretation(kb, arch.algebra)
    return arch, interp


# commands

def parse_command(kb: RuleBase, grammar: TypedGrammar, text: str) -> Term:
    """One or two tokens; tokens outside the rule base keep a positional sort.

    An unknown first token of a pair reads as an attribute, any other unknown
    token as a predicate, so out-of-grammar commands still form terms.
    """
    tokens = text.split()
    if len(tokens) == 1:
        return Term.leaf(Atom(name=tokens[0], sort=kb.sorts.get(tokens[0], "PREDICATE")))
    if len(tokens) != 2:
        raise MalformedCommand(f"command {text!r} has {len(tokens)} tokens")
    left = Atom(name=tokens[0], sort=kb.sorts.get(tokens[0], "ATTRIBUTE"))
    right = Atom(name=tokens[1], sort=kb.sorts.get(tokens[1], "PREDICATE"))
    for c in grammar.constructors.values():
        if c.arg_sorts == (left.sort, right.sort):
            return Term.node(c, Term.leaf(left), Term.leaf(right))
    raise MalformedCommand(f"no constructor takes ({left.sort}, {right.sort}) for {text!r}")


def in_grammar_composites(grammar: TypedGrammar) -> List[Term]:
    """Every depth-2 term."""
    return [t for t in grammar.enumerate_terms(2) if not t.is_leaf]


# novel atoms, so the rule base has no entry for them
DEFAULT_HELDOUT: Dict[str, RoleMeaning] = {
    "green dragon": RoleMeaning.of(["COLOR:GREEN", "TYPE:DRAGON"]),
    "red unicorn": RoleMeaning.of(["COLOR:RED", "TYPE:UNICORN"]),
    "unicorn": RoleMeaning.of(["TYPE:UNICORN"]),
}
