import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from exact_core import (MalformedRational, Matrix, Vector, basis_vector, format_rational,
                        parse_rational, vec_scale)
from gerbe import GerbeData, gerbes_isomorphic, translate_gerbe, translation_delta_b
from obstruction import (FirstObstructionNonzero, Obstruction, ObstructionContext,
                         ObstructionVerdict, SubgroupSpec, gerbal_class, obstruction_vanishes,
                         theta_table, xi_character)
from symmetry import SubgroupCase, in_subgroup, membership_table, p_class
from torus import AltForm2, AltForm3, TorusData, check_complex_structure, standard_torus, type_condition_check
from trivialization import VerificationSettings, build_context, default_pairs, tau_failures

logger = logging.getLogger(__name__)

COMMANDS = ('check-torus', 'check-type', 'translate', 'membership', 'tau-verify', 'xi',
            'obstruction1', 'obstruction2', 'theta-table', 'gerbal-class', 'example')
# commands that read a problem file whose E may fail the type condition
TYPE_EXEMPT = ('check-torus', 'check-type')


class ProblemError(ValueError):
    """Bad input, anchored at the offending field when one is known."""

    def __init__(self, message: str, field_path: Optional[str] = None):
        super().__init__(f"{field_path}: {message}" if field_path else message)
        self.field_path = field_path


class NonIncreasingIndices(ProblemError):
    pass


class BadDimensions(ProblemError):
    pass


class UnknownCommand(ProblemError):
    pass


@dataclass
class ProblemFile:
    n: int
    J: Matrix
    E: AltForm3
    B: AltForm2
    vectors: Dict[str, Vector] = field(default_factory=dict)
    case: SubgroupCase = SubgroupCase.INTEGRAL

    @property
    def torus(self) -> TorusData:
        return check_complex_structure(self.J)

    @property
    def gerbe(self) -> GerbeData:
        return GerbeData(self.torus, self.B, self.E)


# --- parsing ---

def _rational(value, path: str) -> Fraction:
    try:
        return parse_rational(value)
    except MalformedRational as e:
        raise MalformedRational(f"{path}: {e}") from e


def _indices(raw, arity: int, dim: int, path: str) -> Tuple[int, ...]:
    if not isinstance(raw, list) or len(raw) != arity or not all(isinstance(i, int) for i in raw):
        raise BadDimensions(f"expected {arity} integer indices, got {raw!r}", path)
    if any(not 1 <= i <= dim for i in raw):
        raise BadDimensions(f"indices must lie in 1..{dim}, got {raw}", path)
    if any(a >= b for a, b in zip(raw, raw[1:])):
        raise NonIncreasingIndices(f"indices must be strictly increasing, got {raw}", path)
    return tuple(i - 1 for i in raw)


def _parse_vector(raw, dim: int, path: str) -> Vector:
    entries = raw.split(',') if isinstance(raw, str) else raw
    if not isinstance(entries, list) or len(entries) != dim:
        raise BadDimensions(f"expected a vector of length {dim}, got {raw!r}", path)
    return tuple(_rational(x.strip() if isinstance(x, str) else x, f"{path}[{i}]")
                 for i, x in enumerate(entries))


def _term_list(doc: dict, key: str) -> list:
    terms = doc.get(key) or []
    if not isinstance(terms, list):
        raise ProblemError(f"expected a list of terms, got {type(terms).__name__}", key)
    return terms


def parse_problem(text: str, require_type_condition: bool = True) -> ProblemFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemError(f"line {e.lineno} column {e.colno}: {e.msg}", 'document') from e
    if not isinstance(doc, dict):
        raise ProblemError("top level must be an object", 'document')

    n = doc.get('n')
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise BadDimensions(f"n must be a positive integer, got {n!r}", 'n')
    dim = 2 * n

    raw_j = doc.get('J')
    if not isinstance(raw_j, list) or len(raw_j) != dim:
        raise BadDimensions(f"J must have {dim} rows", 'J')
    J = []
    for r, row in enumerate(raw_j):
        if not isinstance(row, list) or len(row) != dim:
            raise BadDimensions(f"row must have {dim} entries", f"J[{r}]")
        J.append(tuple(_rational(x, f"J[{r}][{c}]") for c, x in enumerate(row)))

    e_terms = {}
    for k, term in enumerate(_term_list(doc, 'E')):
        path = f"E[{k}]"
        if not isinstance(term, dict):
            raise ProblemError("expected an object with indices and coeff", path)
        triple = _indices(term.get('indices'), 3, dim, f"{path}.indices")
        coeff = _rational(term.get('coeff'), f"{path}.coeff")
        if coeff.denominator != 1:
            raise ProblemError(f"E coefficients must be integers, got {coeff}", f"{path}.coeff")
        e_terms[triple] = e_terms.get(triple, Fraction(0)) + coeff

    b_terms = {}
    for k, term in enumerate(_term_list(doc, 'B')):
        path = f"B[{k}]"
        if not isinstance(term, dict):
            raise ProblemError("expected an object with indices and coeff", path)
        pair = _indices(term.get('indices'), 2, dim, f"{path}.indices")
        b_terms[pair] = b_terms.get(pair, Fraction(0)) + _rational(term.get('coeff'), f"{path}.coeff")

    raw_vectors = doc.get('vectors') or {}
    if not isinstance(raw_vectors, dict):
        raise ProblemError(f"expected an object of named vectors, got {type(raw_vectors).__name__}", 'vectors')
    vectors = {name: _parse_vector(raw, dim, f"vectors.{name}") for name, raw in raw_vectors.items()}

    try:
        case = SubgroupCase(doc.get('case', SubgroupCase.INTEGRAL.value))
    except ValueError as e:
        raise ProblemError(f"case must be 'integral' or 'oneone', got {doc.get('case')!r}", 'case') from e

    problem = ProblemFile(n=n, J=tuple(J), E=AltForm3.from_terms(dim, e_terms),
                          B=AltForm2.from_terms(dim, b_terms), vectors=vectors, case=case)
    torus = problem.torus
    if require_type_condition:
        GerbeData(torus, problem.B, problem.E)
    return problem


def render_problem(problem: ProblemFile) -> str:
    doc = {
        'n': problem.n,
        'J': [[format_rational(x) for x in row] for row in problem.J],
        'E': [{'indices': [i + 1 for i in t], 'coeff': format_rational(c)}
              for t, c in problem.E.coeffs],
        'B': _form2_json(problem.B),
        'vectors': {name: _vector_json(v) for name, v in problem.vectors.items()},
        'case': problem.case.value,
    }
    return json.dumps(doc, indent=2, sort_keys=True)


# --- report helpers ---

def _vector_json(v: Sequence) -> List[str]:
    return [format_rational(c) for c in v]


def _form2_json(omega: AltForm2) -> list:
    return [{'indices': [a + 1, b + 1], 'coeff': format_rational(c)}
            for (a, b), c in sorted(omega.terms().items())]


def _verdict_json(verdict: ObstructionVerdict) -> dict:
    return {
        'obstruction': verdict.which.value,
        'vanishes': verdict.vanishes,
        'certificate': [_vector_json(v) for v in verdict.certificate] if verdict.certificate else None,
        'value': verdict.value.to_json() if verdict.value else None,
        'cross_check': verdict.cross_check,
    }


def _vector_arg(problem: ProblemFile, token: Optional[str], flag: str) -> Vector:
    if token is None:
        raise ProblemError(f"--{flag} is required")
    if token in problem.vectors:
        return problem.vectors[token]
    return _parse_vector(token, 2 * problem.n, f"--{flag}")


def _named_vectors(problem: ProblemFile, tokens: Optional[str]) -> Dict[str, Vector]:
    """Names or inline vectors; inline vectors are separated by ';'."""
    if not tokens:
        raise ProblemError("--generators is required")
    if ';' in tokens:
        parts = tokens.split(';')
    else:
        parts = tokens.split(',')
        if not all(p.strip() in problem.vectors for p in parts):
            parts = [tokens]
    parts = [p.strip() for p in parts if p.strip()]
    return {p: _vector_arg(problem, p, 'generators') for p in parts}


def _case(problem: ProblemFile, args) -> SubgroupCase:
    raw = getattr(args, 'case', None)
    return SubgroupCase(raw) if raw else problem.case


def _settings(args) -> VerificationSettings:
    return VerificationSettings(samples=getattr(args, 'samples', 10), seed=getattr(args, 'seed', 0))


# --- commands ---

def _require_problem(problem: Optional[ProblemFile], cmd: str) -> ProblemFile:
    if problem is None:
        raise ProblemError(f"'{cmd}' needs a problem file")
    return problem


def run_command(cmd: str, problem: Optional[ProblemFile], args) -> Tuple[dict, int]:
    """Returns (report, status) with status 0 computed, 1 nonvanishing or identity failure."""
    if cmd not in COMMANDS:
        raise UnknownCommand(f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}")
    if cmd == 'example':
        return run_example(getattr(args, 'name', None))

    problem = _require_problem(problem, cmd)
    report = {'command': cmd, 'n': problem.n}

    if cmd == 'check-torus':
        report['complex_structure'] = problem.torus.n == problem.n
        return report, 0

    if cmd == 'check-type':
        ok = type_condition_check(problem.torus, problem.E)
        report['type_condition'] = ok
        logger.info("type condition %s", 'holds' if ok else 'fails')
        return report, 0 if ok else 1

    gerbe = problem.gerbe
    T = gerbe.torus

    if cmd == 'translate':
        w = _vector_arg(problem, args.w, 'w')
        moved = translate_gerbe(gerbe, w)
        report.update({'w': _vector_json(w), 'delta_B': _form2_json(translation_delta_b(gerbe, w)),
                       'B': _form2_json(moved.B), 'isomorphic': gerbes_isomorphic(gerbe, moved)})
        return report, 0

    if cmd == 'membership':
        w = _vector_arg(problem, args.w, 'w')
        pc = p_class(T, gerbe.E, w)
        report.update({
            'w': _vector_json(w),
            'representative': _form2_json(pc.representative),
            'in_K': pc.is_zero,
            'integral': in_subgroup(T, gerbe.E, w, SubgroupCase.INTEGRAL),
            'oneone': in_subgroup(T, gerbe.E, w, SubgroupCase.TYPE_ONE_ONE),
        })
        return report, 0

    case = _case(problem, args)
    report['case'] = case.value

    if cmd == 'tau-verify':
        w = _vector_arg(problem, args.w, 'w')
        ctx = build_context(gerbe, w, case)
        pairs = default_pairs(T.dim, _settings(args))
        failures = tau_failures(ctx, pairs)
        report.update({
            'w': _vector_json(w),
            'pairs_checked': len(pairs),
            'passed': not failures,
            'failures': [{'lambda1': _vector_json(f.lam1), 'lambda2': _vector_json(f.lam2),
                          'residual': f.residual.to_json()} for f in failures],
        })
        logger.info("tau identity %s on %d pairs", 'holds' if not failures else 'FAILS', len(pairs))
        return report, 1 if failures else 0

    ctx = ObstructionContext(gerbe, case)

    if cmd == 'xi':
        w1, w2 = _vector_arg(problem, args.w1, 'w1'), _vector_arg(problem, args.w2, 'w2')
        report.update({'w1': _vector_json(w1), 'w2': _vector_json(w2),
                       'character': xi_character(ctx, w1, w2).to_json()})
        return report, 0

    if cmd == 'gerbal-class':
        ws = [_vector_arg(problem, getattr(args, f), f) for f in ('w1', 'w2', 'w3')]
        report['w'] = [_vector_json(w) for w in ws]
        try:
            report['gerbal_class'] = gerbal_class(ctx, *ws).to_json()
        except FirstObstructionNonzero as e:
            report['first_obstruction_nonzero'] = str(e)
            return report, 1
        return report, 0

    named = _named_vectors(problem, args.generators)
    report['generators'] = {name: _vector_json(v) for name, v in named.items()}

    if cmd == 'theta-table':
        report['theta'] = theta_table(ctx, named).to_dict(orient='records')
        return report, 0

    spec = SubgroupSpec(list(named.values()), case)
    first = obstruction_vanishes(spec, gerbe, Obstruction.FIRST)
    report['first'] = _verdict_json(first)
    logger.info("first obstruction %s", 'vanishes' if first.vanishes else 'does NOT vanish')
    if cmd == 'obstruction1':
        return report, 0 if first.vanishes else 1

    second = obstruction_vanishes(spec, gerbe, Obstruction.SECOND)
    report['second'] = _verdict_json(second)
    logger.info("second obstruction %s", 'vanishes' if second.vanishes else 'does NOT vanish')
    return report, 0 if first.vanishes and second.vanishes else 1


# --- built-in examples ---

def _half_basis(dim: int, indices: Sequence[int]) -> List[Vector]:
    return [vec_scale(Fraction(1, 2), basis_vector(dim, i)) for i in indices]


def _e123(scale: int) -> AltForm3:
    return AltForm3.from_terms(4, {(0, 1, 2): scale})


def run_example(name: Optional[str]) -> Tuple[dict, int]:
    T = standard_torus(2)
    if name == 'first-obstruction':
        gerbe = GerbeData(T, AltForm2.zero(4), _e123(2))
        spec = SubgroupSpec(_half_basis(4, [0, 1]), SubgroupCase.INTEGRAL)
        verdict = obstruction_vanishes(spec, gerbe, Obstruction.FIRST)
        return {'example': name, 'E': '2 e1*^e2*^e3*', 'first': _verdict_json(verdict)}, \
            0 if verdict.vanishes else 1

    if name == 'second-obstruction':
        gerbe = GerbeData(T, AltForm2.zero(4), _e123(4))
        spec = SubgroupSpec(_half_basis(4, range(4)), SubgroupCase.INTEGRAL)
        first = obstruction_vanishes(spec, gerbe, Obstruction.FIRST)
        second = obstruction_vanishes(spec, gerbe, Obstruction.SECOND)
        report = {'example': name, 'E': '4 e1*^e2*^e3*',
                  'first': _verdict_json(first), 'second': _verdict_json(second)}
        return report, 0 if first.vanishes and second.vanishes else 1

    if name == 'k-group':
        E = _e123(1)
        grid = [Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(1)]
        table = membership_table(T, E, grid)
        rule = all(row['integral'] == all(parse_rational(row[f"w{i}"]).denominator == 1 for i in (1, 2, 3))
                   for row in table.to_dict(orient='records'))
        doubled = 2 * E
        half_lattice = all(in_subgroup(T, doubled, w, SubgroupCase.INTEGRAL) for w in _half_basis(4, range(4)))
        report = {'example': name, 'E': 'e1*^e2*^e3*', 'grid': [format_rational(g) for g in grid],
                  'membership': table.to_dict(orient='records'),
                  'integral_iff_w1_w2_w3_integer': rule,
                  'half_lattice_integral_for_doubled_E': half_lattice}
        return report, 0

    raise UnknownCommand(f"unknown example {name!r}; expected first-obstruction, second-obstruction or k-group")


# --- entry point ---

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Symmetries and equivariance obstructions of gerbes on complex tori.")
    parser.add_argument('command', help=', '.join(COMMANDS))
    parser.add_argument('problem', nargs='?', help="JSON problem file")
    parser.add_argument('--case', choices=[c.value for c in SubgroupCase])
    parser.add_argument('--generators', help="vector names or inline vectors, comma separated names or ';' separated vectors")
    parser.add_argument('--w')
    parser.add_argument('--w1')
    parser.add_argument('--w2')
    parser.add_argument('--w3')
    parser.add_argument('--samples', type=int, default=10)
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--name', help="example name: first-obstruction, second-obstruction, k-group")
    parser.add_argument('--verbose', action='store_true')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(levelname)s %(message)s', stream=sys.stderr)
    try:
        problem = None
        if args.problem:
            with open(args.problem, encoding='utf-8') as handle:
                problem = parse_problem(handle.read(), require_type_condition=args.command not in TYPE_EXEMPT)
        report, status = run_command(args.command, problem, args)
    except (ValueError, OSError) as e:
        module = type(e).__module__
        if not isinstance(e, ValueError) or module in ('builtins', '__main__'):
            module = 'cli'
        logger.error("[!] %s: %s", type(e).__name__, e)
        report, status = {'error': str(e), 'kind': type(e).__name__, 'module': module}, 2
    print(json.dumps(report, indent=2, sort_keys=True))
    return status


if __name__ == '__main__':
    sys.exit(main())
