"""
OPB instances, trace files and statistics CSV

OPB here is the linear dialect of the PB evaluations:

    * #variable= 3 #constraint= 1
    +1 x1 +2 ~x2 -3 x3 >= 1 ;

Trace files hold one JSON object per line; constraints inside them use the
same term syntax without the trailing semicolon.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import re
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Iterable, Iterator, List, Optional, Tuple, Union

from .constraint import Literal, PBConstraint, RawConstraint, Relation, normalize
from .errors import OpbParseError, TraceFormatError
from .trace import DerivationTrace, Rule, TraceStep

logger = logging.getLogger(__name__)

HEADER_RE = re.compile(r"#variable=\s*(\d+)\s+#constraint=\s*(\d+)")
TOKEN_RE = re.compile(
    r"(?P<rel>>=|<=|=)|(?P<int>[+-]?\d+)|(?P<lit>~?x\d+)|(?P<semi>;)|(?P<other>[^\s;]+)"
)
OBJECTIVE_RE = re.compile(r"^\s*(min|max)\s*:")

_RELATIONS = {">=": Relation.GE, "<=": Relation.LE, "=": Relation.EQ}
TAUTOLOGY_MARKER = "tautology omitted"


@dataclass
class OpbDocument:
    """A parsed OPB file; declared counts come from the header comment"""

    constraints: List[RawConstraint] = field(default_factory=list)
    variables: Optional[int] = None
    declared_constraints: Optional[int] = None
    comments: List[str] = field(default_factory=list)

    @classmethod
    def from_constraints(cls, constraints: Iterable[PBConstraint], comments: Iterable[str] = ()) -> OpbDocument:
        raw = [RawConstraint(tuple(c), Relation.GE, c.degree) for c in constraints]
        return cls(raw, comments=list(comments))

    @property
    def num_variables(self) -> int:
        used = max((lit.variable for raw in self.constraints for _, lit in raw.terms), default=0)
        return max(used, self.variables or 0)

    def normalized(self) -> List[PBConstraint]:
        return [c for raw in self.constraints for c in normalize(raw)]


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokens(text: str) -> Iterator[_Token]:
    for line_no, line in enumerate(text.splitlines(), start=1):
        if line.lstrip().startswith("*"):
            continue
        for match in TOKEN_RE.finditer(line):
            yield _Token(match.lastgroup, match.group(), line_no, match.start() + 1)


def _literal(token: _Token) -> Literal:
    negated = token.text.startswith("~")
    index = int(token.text.lstrip("~")[1:])
    if index < 1:
        raise OpbParseError(f"variable index must be positive, got {token.text}", token.line, token.column)
    return Literal(index, not negated)


def _parse_constraints(text: str) -> Iterator[Tuple[RawConstraint, int]]:
    """Yield (constraint, line) pairs from objective-free OPB text"""
    terms: List[Tuple[int, Literal]] = []
    relation: Optional[Relation] = None
    rhs: Optional[int] = None
    coefficient: Optional[int] = None
    start_line: Optional[int] = None
    previous = ""
    last: Optional[_Token] = None

    for token in _tokens(text):
        last = token
        if start_line is None:
            start_line = token.line
        kind = token.kind
        if kind == "other":
            if token.text[0] in "<>!":
                raise OpbParseError(f"unknown relation '{token.text}'", token.line, token.column)
            raise OpbParseError(f"unexpected token '{token.text}'", token.line, token.column)
        if relation is None:
            if kind == "int":
                if coefficient is not None:
                    raise OpbParseError("coefficient without a literal", token.line, token.column)
                coefficient = int(token.text)
            elif kind == "lit":
                if coefficient is None:
                    if previous == "lit":
                        raise OpbParseError("non-linear product terms are not supported", token.line, token.column)
                    raise OpbParseError(f"literal {token.text} has no coefficient", token.line, token.column)
                terms.append((coefficient, _literal(token)))
                coefficient = None
            elif kind == "rel":
                if coefficient is not None:
                    raise OpbParseError("coefficient without a literal", token.line, token.column)
                relation = _RELATIONS[token.text]
            else:
                raise OpbParseError("constraint has no relation", token.line, token.column)
        elif rhs is None:
            if kind != "int":
                raise OpbParseError(
                    f"expected an integer after the relation, got '{token.text}'", token.line, token.column
                )
            rhs = int(token.text)
        elif kind == "semi":
            yield RawConstraint(tuple(terms), relation, rhs), start_line
            terms, relation, rhs, coefficient, start_line = [], None, None, None, None
        else:
            raise OpbParseError(f"expected ';', got '{token.text}'", token.line, token.column)
        previous = kind

    if start_line is not None:
        raise OpbParseError("unterminated constraint, missing ';'", last.line, last.column + len(last.text))


def _strip_objective(text: str) -> str:
    """Blank out objective functions, keeping line numbers intact"""
    lines = text.splitlines()
    skipping = False
    for index, line in enumerate(lines):
        if skipping or OBJECTIVE_RE.match(line):
            if not skipping:
                logger.warning("line %d: ignoring objective function", index + 1)
            skipping = ";" not in line
            lines[index] = ""
    return "\n".join(lines)


def parse_opb(text: str) -> OpbDocument:
    """Parse linear OPB text

    Raises:
        OpbParseError: With the line and column of the offending token
    """
    document = OpbDocument()
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped.startswith("*"):
            continue
        header = HEADER_RE.search(stripped)
        if header and document.variables is None:
            document.variables = int(header.group(1))
            document.declared_constraints = int(header.group(2))
        else:
            document.comments.append(stripped[1:].strip())

    document.constraints = [raw for raw, _ in _parse_constraints(_strip_objective(text))]

    if document.declared_constraints is not None and document.declared_constraints != len(document.constraints):
        logger.warning(
            "header declares %d constraints, found %d", document.declared_constraints, len(document.constraints)
        )
    used = document.num_variables
    if document.variables is not None and used > document.variables:
        logger.warning("header declares %d variables, found index %d", document.variables, used)
    return document


def parse_constraint(text: str) -> RawConstraint:
    """Parse a single constraint; the trailing ';' is optional"""
    body = text.strip()
    if not body.endswith(";"):
        body += " ;"
    parsed = list(_parse_constraints(body))
    if len(parsed) != 1:
        raise OpbParseError(f"expected exactly one constraint, found {len(parsed)}", 1)
    return parsed[0][0]


def format_raw(raw: RawConstraint) -> str:
    relation, rhs = raw.relation, raw.rhs
    if relation is Relation.GT:
        relation, rhs = Relation.GE, rhs + 1
    elif relation is Relation.LT:
        relation, rhs = Relation.LE, rhs - 1
    terms = " ".join(f"{coef:+d} {lit}" for coef, lit in raw.terms)
    return f"{terms} {relation.value} {rhs} ;".lstrip()


def write_opb(document: OpbDocument) -> str:
    """Render a document; constraints that normalize to a tautology become a comment"""
    body: List[str] = []
    emitted = 0
    for raw in document.constraints:
        if all(c.is_tautology() for c in normalize(raw)):
            body.append(f"* {TAUTOLOGY_MARKER}")
            continue
        body.append(format_raw(raw))
        emitted += 1
    header = f"* #variable= {document.num_variables} #constraint= {emitted}"
    comments = [f"* {comment}" for comment in document.comments if comment != TAUTOLOGY_MARKER]
    return "\n".join([header, *comments, *body]) + "\n"


def constraint_from_text(text: str, line: int = 1) -> PBConstraint:
    """Read a normalized constraint rendered by str(PBConstraint), as is

    Unlike normalize, this keeps non-canonical forms (a degree-0 constraint
    with terms, an unsatisfiable one with terms) so traces read back exactly.
    """
    try:
        raw = parse_constraint(text)
    except OpbParseError as e:
        raise TraceFormatError(f"bad constraint '{text}': {e.message}", line) from e
    if raw.relation is not Relation.GE or raw.rhs < 0 or any(coef < 1 for coef, _ in raw.terms):
        raise TraceFormatError(f"constraint '{text}' is not normalized", line)
    try:
        return PBConstraint.of(raw.terms, raw.rhs)
    except ValueError as e:
        raise TraceFormatError(str(e), line) from e


# -- traces ------------------------------------------------------------------


def step_to_record(step: TraceStep) -> dict:
    record = {"step": step.step, "rule": step.rule.value, "operands": list(step.operands)}
    if step.pivot is not None:
        record["pivot"] = step.pivot
    if step.divisor is not None:
        record["divisor"] = step.divisor
    if step.multiplier is not None:
        record["multiplier"] = step.multiplier
    if step.literal is not None:
        record["literal"] = str(step.literal)
    if step.strategy is not None:
        record["strategy"] = step.strategy
        record["removed"] = [str(lit) for lit in step.removed]
    record["constraint"] = str(step.result)
    return record


def _int_field(record: dict, key: str, line: int) -> Optional[int]:
    value = record.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise TraceFormatError(f"'{key}' must be an integer", line)
    return value


def _literal_field(text: Any, line: int) -> Literal:
    try:
        return Literal.parse(text)
    except (ValueError, AttributeError) as e:
        raise TraceFormatError(f"bad literal {text!r}", line) from e


def record_to_step(record: dict, line: int) -> TraceStep:
    if not isinstance(record, dict):
        raise TraceFormatError("record is not an object", line)
    try:
        rule = Rule(record["rule"])
    except (KeyError, ValueError) as e:
        raise TraceFormatError(f"unknown or missing rule {record.get('rule')!r}", line) from e
    step = _int_field(record, "step", line)
    if step is None:
        raise TraceFormatError("missing step id", line)
    operands = record.get("operands", [])
    if not isinstance(operands, list) or any(isinstance(o, bool) or not isinstance(o, int) for o in operands):
        raise TraceFormatError("'operands' must be a list of step ids", line)
    if "constraint" not in record:
        raise TraceFormatError("missing constraint", line)

    literal = record.get("literal")
    strategy = record.get("strategy")
    if rule is Rule.ELIMINATE and strategy not in ("weaken", "simple"):
        raise TraceFormatError(f"unknown elimination strategy {strategy!r}", line)
    return TraceStep(
        step=step,
        rule=rule,
        operands=tuple(operands),
        result=constraint_from_text(str(record["constraint"]), line),
        pivot=_int_field(record, "pivot", line),
        divisor=_int_field(record, "divisor", line),
        multiplier=_int_field(record, "multiplier", line),
        literal=None if literal is None else _literal_field(literal, line),
        strategy=strategy,
        removed=tuple(_literal_field(text, line) for text in record.get("removed", [])),
    )


def write_trace(trace: DerivationTrace) -> str:
    return "".join(json.dumps(step_to_record(step)) + "\n" for step in trace)


def iter_trace(text: str) -> Iterator[Tuple[int, Union[TraceStep, TraceFormatError]]]:
    """Decode records one line at a time, yielding errors instead of raising"""
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            yield line_no, record_to_step(json.loads(line), line_no)
        except json.JSONDecodeError as e:
            yield line_no, TraceFormatError(f"invalid JSON ({e.msg})", line_no)
        except TraceFormatError as e:
            yield line_no, e


def read_trace(text: str) -> DerivationTrace:
    """Strict inverse of write_trace

    Raises:
        TraceFormatError: At the first malformed or out-of-sequence record
    """
    trace = DerivationTrace()
    for line_no, item in iter_trace(text):
        if isinstance(item, TraceFormatError):
            raise item
        try:
            trace.append(item)
        except ValueError as e:
            raise TraceFormatError(str(e), line_no) from e
    return trace


# -- statistics --------------------------------------------------------------


@dataclass
class InstanceStats:
    """One row of the analysis CSV"""

    instance: str
    family: str
    constraints_dumped: int = 0
    constraints_with_irrelevant: int = 0
    irrelevant_literals_total: int = 0
    checks_performed: int = 0
    skipped_constraints: int = 0
    cancellations: int = 0


STATS_FIELDS = [f.name for f in fields(InstanceStats)]


def write_stats_csv(rows: Iterable[InstanceStats]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=STATS_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(asdict(row))
    return buffer.getvalue()
