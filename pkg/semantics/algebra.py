"""
Typed grammars, semantic algebras, intended interpretations and the homomorphic
extension of atom meanings to whole terms.
"""

from __future__ import annotations

import itertools
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from schemas.documents import GrammarDocument
from schemas.meanings import VectorMeaning
from schemas.terms import Atom, Constructor, Term
from semantics.errors import ConfigError, SortMismatch, UndefinedAtom, UnknownToken
from semantics.spaces import EuclideanSpace, PseudometricSpace

MeaningOp = Callable[[Tuple[Any, ...]], Any]


class TypedGrammar:
    """Alphabet of sorted atoms plus typed constructors."""

    def __init__(self, atoms: Iterable[Atom], constructors: Iterable[Constructor] = ()) -> None:
        self.atoms: Dict[str, Atom] = {}
        for atom in atoms:
            if atom.name in self.atoms:
                raise ValueError(f"duplicate atom name {atom.name!r}")
            self.atoms[atom.name] = atom
        self.constructors: Dict[str, Constructor] = {}
        for c in constructors:
            if c.name in self.constructors:
                raise ValueError(f"duplicate constructor {c.name!r}")
            self.constructors[c.name] = c

    def atom(self, name: str) -> Atom:
        try:
            return self.atoms[name]
        except KeyError:
            raise UnknownToken(name) from None

    def leaf(self, name: str) -> Term:
        return Term.leaf(self.atom(name))

    def apply(self, name: str, *children: Term) -> Term:
        constructor = self.constructors[name]
        got = tuple(c.sort for c in children)
        if got != constructor.arg_sorts:
            raise SortMismatch(name, constructor.arg_sorts, got)
        return Term.node(constructor, *children)

    def atoms_of_sort(self, sort: str) -> List[Atom]:
        return [a for a in self.atoms.values() if a.sort == sort]

    def enumerate_terms(self, max_depth: int, limit: Optional[int] = None) -> List[Term]:
        """All well-typed terms up to `max_depth`, shallowest first."""
        by_depth: List[List[Term]] = [[Term.leaf(a) for a in self.atoms.values()]]
        out: List[Term] = list(by_depth[0])
        for depth in range(2, max_depth + 1):
            known = [t for level in by_depth for t in level]
            by_sort: Dict[str, List[Term]] = {}
            for t in known:
                by_sort.setdefault(t.sort, []).append(t)
            fresh: List[Term] = []
            for c in self.constructors.values():
                pools = [by_sort.get(s, []) for s in c.arg_sorts]
                for args in itertools.product(*pools):
                    # keep only terms whose depth is exactly `depth`
                    if max(a.depth() for a in args) != depth - 1:
                        continue
                    fresh.append(Term.node(c, *args))
                    if limit is not None and len(out) + len(fresh) >= limit:
                        return (out + fresh)[:limit]
            by_depth.append(fresh)
            out.extend(fresh)
        return out if limit is None else out[:limit]

    def random_term(self, rng: np.random.Generator, max_depth: int, sort: Optional[str] = None) -> Term:
        """Uniform-ish random well-typed term of depth <= max_depth."""
        leaves = [a for a in self.atoms.values() if sort is None or a.sort == sort]
        producers = [c for c in self.constructors.values() if sort is None or c.result_sort == sort]
        if max_depth > 1 and producers and (not leaves or rng.random() < 0.6):
            c = producers[int(rng.integers(len(producers)))]
            children = [self.random_term(rng, max_depth - 1, s) for s in c.arg_sorts]
            return Term.node(c, *children)
        if not leaves:
            raise ValueError(f"no atoms of sort {sort!r}")
        return Term.leaf(leaves[int(rng.integers(len(leaves)))])


class SemanticAlgebra:
    """Meaning space plus one meaning operation per grammar constructor."""

    def __init__(self, grammar: TypedGrammar, space: PseudometricSpace, operations: Mapping[str, MeaningOp]) -> None:
        missing = set(grammar.constructors) - set(operations)
        extra = set(operations) - set(grammar.constructors)
        if missing or extra:
            raise ValueError(f"algebra/grammar mismatch: missing={sorted(missing)} extra={sorted(extra)}")
        self.grammar = grammar
        self.space = space
        self.operations: Dict[str, MeaningOp] = dict(operations)

    def apply(self, constructor: Constructor, args: Sequence[Any]) -> Any:
        if len(args) != constructor.arity:
            raise SortMismatch(constructor.name, constructor.arg_sorts, f"{len(args)} arguments")
        return self.operations[constructor.name](tuple(args))

    def distance(self, a: Any, b: Any) -> float:
        return self.space.distance(a, b)


def vector_sum(args: Tuple[Any, ...]) -> VectorMeaning:
    total = np.sum([np.asarray(a.values, dtype=np.float64) for a in args], axis=0)
    return VectorMeaning.of(total)


def vector_addition_algebra(grammar: TypedGrammar, dim: int) -> SemanticAlgebra:
    """Every constructor is interpreted as vector addition in R^dim."""
    return SemanticAlgebra(grammar, EuclideanSpace(dim), {name: vector_sum for name in grammar.constructors})


class IntendedInterpretation:
    """Partial map atom -> gold meaning, tied to a semantic algebra."""

    def __init__(self, algebra: SemanticAlgebra, table: Mapping[str, Any]) -> None:
        for name, value in table.items():
            if name not in algebra.grammar.atoms:
                raise ValueError(f"interpretation domain contains {name!r}, which is not in the alphabet")
            if not algebra.space.contains(value):
                raise ValueError(f"meaning for {name!r} is outside the meaning space {algebra.space.name}")
        self.algebra = algebra
        self.table: Dict[str, Any] = dict(table)

    @property
    def domain(self) -> List[str]:
        return list(self.table)

    def __call__(self, atom: Atom) -> Any:
        try:
            return self.table[atom.name]
        except KeyError:
            raise UndefinedAtom(atom.name) from None

    def __contains__(self, atom: Atom) -> bool:
        return atom.name in self.table


def homomorphic_extension(interp: IntendedInterpretation, term: Term) -> Any:
    """Gold meaning of a whole term: I on leaves, f^M over children on nodes."""
    if term.atom is not None:
        return interp(term.atom)
    values = [homomorphic_extension(interp, c) for c in term.children]
    return interp.algebra.apply(term.constructor, values)


def node_deviations(F: Callable[[Term], Any], algebra: SemanticAlgebra, terms: Iterable[Term]) -> List[Tuple[Term, float]]:
    """d(F(f(t1..tn)), f^M(F(t1)..F(tn))) for every node among the terms and their subterms."""
    seen: Dict[Term, None] = {}
    for t in terms:
        for s in t.subterms():
            seen.setdefault(s, None)
    out: List[Tuple[Term, float]] = []
    cache: Dict[Term, Any] = {}

    def value(t: Term) -> Any:
        if t not in cache:
            cache[t] = F(t)
        return cache[t]

    for node in seen:
        if node.is_leaf:
            continue
        combined = algebra.apply(node.constructor, [value(c) for c in node.children])
        out.append((node, algebra.distance(value(node), combined)))
    return out


def check_homomorphism(F: Callable[[Term], Any], algebra: SemanticAlgebra, terms: Iterable[Term]) -> float:
    """Max per-node homomorphism deviation; 0 exactly when F respects every constructor."""
    deviations = node_deviations(F, algebra, terms)
    return max((d for _, d in deviations), default=0.0)


# grammar documents

def grammar_from_document(doc: GrammarDocument) -> Tuple[TypedGrammar, IntendedInterpretation]:
    """Build the grammar and intended interpretation a GrammarDocument describes."""
    atoms = [Atom(name=a.name, sort=a.sort) for a in doc.atoms]
    constructors = [Constructor(name=c.name, arg_sorts=tuple(c.arg_sorts), result_sort=c.result_sort) for c in doc.constructors]
    grammar = TypedGrammar(atoms, constructors)
    if doc.algebra == "vector_add":
        dims = {len(m.values) for m in doc.interpretation.values() if isinstance(m, VectorMeaning)}
        dim = doc.dim or (dims.pop() if len(dims) == 1 else None)
        if dim is None:
            raise ConfigError("vector_add grammars need a dim or vector meanings of one width")
        algebra = vector_addition_algebra(grammar, dim)
    else:
        # imported lazily: role operations live with the symbolic architecture
        from architectures.symbolic import RoleSetSpace, compose_roles

        ops = {
            c.name: (lambda args, op=c.op or "conj": compose_roles(args[0], args[1], op))
            for c in doc.constructors
        }
        algebra = SemanticAlgebra(grammar, RoleSetSpace(), ops)
    try:
        interp = IntendedInterpretation(algebra, doc.interpretation)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return grammar, interp


def load_grammar(path: Union[str, Path]) -> Tuple[TypedGrammar, IntendedInterpretation]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"grammar file not found: {path}")
    try:
        doc = GrammarDocument.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise ConfigError(f"invalid grammar file {path}: {e}") from e
    return grammar_from_document(doc)
