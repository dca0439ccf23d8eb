"""
Mean King retrodiction and King-tracking protocols.

MKP: Alice prepares |R>/sqrt(d); the King measures particle 1 in a basis b of
his choosing; Alice measures the pair in the line basis; told b afterwards, she
names the King's outcome m with certainty.

TRACK: Alice prepares a line state |P_j>; the King measures in a hidden basis;
from her line-basis outcome Alice names b, or reports that it is undetermined.
"""

import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

from tqdm import tqdm

from meslab.arith import Dimension, ModInt, as_dimension, cyc_abs2, cyc_to_fraction
from meslab.errors import ConfigError
from meslab.geometry import Line, Point, all_lines, lines_through_point, row_at
from meslab.hilbert import PairKet, norm2, normalize, partial_inner_1, states_equal, tensor
from meslab.mes import line_overlap, line_state, point_state, royal_state
from meslab.mub import BasisLabel, MubLabel, basis_labels, mub_state, parse_basis
from meslab.reports import VerificationReport
from meslab.rng import cumulative_weights, resolve_seed, sample_cumulative, sample_index, trial_generator

logger = logging.getLogger(__name__)


class Protocol(Enum):
    MKP = "mkp"
    TRACK = "track"


class Verdict(Enum):
    CORRECT = "correct"
    UNDETERMINED = "undetermined"
    ERROR = "error"


class Undetermined(Enum):
    UNDETERMINED = "undetermined"

    def __str__(self) -> str:
        return self.value


UNDETERMINED = Undetermined.UNDETERMINED

Deduction = Union[ModInt, BasisLabel, Undetermined]


@dataclass(frozen=True)
class KingChoice:
    basis: BasisLabel
    m: ModInt

    def to_json(self) -> Dict[str, Any]:
        return {'b': self.basis.to_json(), 'm': self.m.value}


@dataclass(frozen=True)
class AliceOutcome:
    """Label (m_dd', m0'') of the line-basis state Alice finds."""
    m_dd: ModInt
    m0: ModInt

    @property
    def line(self) -> Line:
        return Line(self.m_dd, self.m0)

    def to_json(self) -> List[int]:
        return [self.m_dd.value, self.m0.value]


@dataclass(frozen=True)
class MeasurementRecord:
    protocol: Protocol
    trial: int
    preparation: Optional[Line]
    king: KingChoice
    alice: AliceOutcome
    deduction: Deduction

    @property
    def verdict(self) -> Verdict:
        if self.deduction is UNDETERMINED:
            return Verdict.UNDETERMINED
        expected = self.king.m if self.protocol is Protocol.MKP else self.king.basis
        return Verdict.CORRECT if self.deduction == expected else Verdict.ERROR

    def to_json(self) -> Dict[str, Any]:
        if isinstance(self.deduction, ModInt):
            deduced = self.deduction.value
        elif isinstance(self.deduction, BasisLabel):
            deduced = self.deduction.to_json()
        else:
            deduced = str(self.deduction)
        return {
            'trial': self.trial,
            'protocol': self.protocol.value,
            'preparation': 'R' if self.preparation is None else self.preparation.to_json(),
            'king': self.king.to_json(),
            'alice': self.alice.to_json(),
            'deduction': deduced,
            'verdict': self.verdict.value,
        }


@dataclass(frozen=True)
class BasisPolicy:
    """How the King picks his alignment: a fixed basis, or uniform over all d+1."""
    basis: Optional[BasisLabel] = None

    @property
    def uniform(self) -> bool:
        return self.basis is None

    def choose(self, dim: Dimension, rng) -> BasisLabel:
        if self.basis is not None:
            return self.basis
        labels = basis_labels(dim)
        return labels[int(rng.integers(len(labels)))]

    def bases(self, dim: Dimension) -> Tuple[BasisLabel, ...]:
        return basis_labels(dim) if self.basis is None else (self.basis,)

    def describe(self) -> str:
        return "uniform" if self.basis is None else f"fixed({self.basis})"


def parse_policy(text: Optional[str], d: Union[int, Dimension]) -> BasisPolicy:
    """'uniform' (or nothing) for the uniform policy, otherwise a basis label."""
    if text is None or str(text).strip().lower() == "uniform":
        return BasisPolicy()
    try:
        return BasisPolicy(parse_basis(text, d))
    except ValueError as e:
        raise ConfigError(f"invalid basis {text!r}: {e}") from e


@dataclass
class SimReport:
    d: int
    protocol: Protocol
    trials: int
    seed: int
    policy: str
    success_count: int = 0
    undetermined_count: int = 0
    error_count: int = 0
    per_basis: Dict[str, Dict[str, int]] = field(default_factory=dict)
    exact: Dict[str, Any] = field(default_factory=dict)
    line: Optional[Line] = None
    transcript: Optional[List[Dict[str, Any]]] = None

    def add(self, record: MeasurementRecord) -> None:
        verdict = record.verdict
        if verdict is Verdict.CORRECT:
            self.success_count += 1
        elif verdict is Verdict.UNDETERMINED:
            self.undetermined_count += 1
        else:
            self.error_count += 1
        cell = self.per_basis.setdefault(str(record.king.basis), {v.value: 0 for v in Verdict})
        cell[verdict.value] += 1

    def rate(self, count: int) -> float:
        return count / self.trials if self.trials else 0.0

    def within_tolerance(self) -> bool:
        """Empirical verdict rates within 4 sqrt(p(1-p)/N) of the exact ones."""
        observed = {
            Verdict.CORRECT.value: self.success_count,
            Verdict.UNDETERMINED.value: self.undetermined_count,
            Verdict.ERROR.value: self.error_count,
        }
        for name, count in observed.items():
            p = float(Fraction(self.exact.get(name, "0")))
            tolerance = 4 * math.sqrt(p * (1 - p) / self.trials)
            if abs(self.rate(count) - p) > tolerance:
                return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            'd': self.d,
            'protocol': self.protocol.value,
            'trials': self.trials,
            'seed': self.seed,
            'basis_policy': self.policy,
            'exact': self.exact,
            'empirical': {
                'success_count': self.success_count,
                'undetermined_count': self.undetermined_count,
                'error_count': self.error_count,
                'success_rate': self.rate(self.success_count),
                'undetermined_rate': self.rate(self.undetermined_count),
                'error_rate': self.rate(self.error_count),
                'per_basis': self.per_basis,
                'within_tolerance': self.within_tolerance(),
            },
        }
        if self.line is not None:
            doc['line'] = self.line.to_json()
        if self.transcript is not None:
            doc['transcript'] = self.transcript
        return doc


Branch = Tuple[ModInt, Fraction, Optional[PairKet]]


def king_branches(big_psi: PairKet, basis: BasisLabel) -> Tuple[Branch, ...]:
    """(m, probability, post-state) for every King outcome in basis b."""
    branches = []
    for m in big_psi.dim.elements():
        ket = mub_state(MubLabel(m, basis))
        chi = partial_inner_1(ket, big_psi)
        p = cyc_to_fraction(norm2(chi))
        post = tensor(ket, normalize(chi)) if p else None
        branches.append((m, p, post))
    return tuple(branches)


def alice_distribution(big_psi: PairKet) -> Tuple[Tuple[Line, Fraction], ...]:
    """Probability of each line-basis outcome; the lines form an orthonormal basis."""
    return tuple((j, cyc_to_fraction(cyc_abs2(line_overlap(j, big_psi)))) for j in all_lines(big_psi.dim))


def king_measure(big_psi: PairKet, basis: BasisLabel, rng) -> Tuple[ModInt, PairKet]:
    """Measure particle 1 in basis b; returns the outcome and the collapsed pair state."""
    branches = king_branches(big_psi, basis)
    index = sample_index(rng, [p for _, p, _ in branches])
    m, _, post = branches[index]
    return m, post


def alice_measure(big_psi: PairKet, rng) -> AliceOutcome:
    distribution = alice_distribution(big_psi)
    index = sample_index(rng, [p for _, p in distribution])
    j = distribution[index][0]
    return AliceOutcome(j.m_dd, j.m0)


# Label-keyed tables: a preparation is None for |R>/sqrt(d), else its line.

def prepared_state(d: int, preparation: Optional[Line]) -> PairKet:
    return royal_state(d, normalized=True) if preparation is None else line_state(preparation).ket


@lru_cache(maxsize=None)
def branch_table(d: int, preparation: Optional[Line], basis: BasisLabel) -> Tuple[Branch, ...]:
    return king_branches(prepared_state(d, preparation), basis)


@lru_cache(maxsize=None)
def outcome_table(d: int, preparation: Optional[Line], basis: BasisLabel, m: ModInt) -> Tuple[Tuple[Line, Fraction], ...]:
    """Alice's line distribution after the King found m in basis b."""
    for king_m, _, post in branch_table(d, preparation, basis):
        if king_m == m:
            if post is None:
                raise ValueError(f"King outcome {m.value} in basis {basis} has probability 0")
            return alice_distribution(post)
    raise ValueError(f"no King outcome {m!r}")


@lru_cache(maxsize=None)
def _king_sampler(d: int, preparation: Optional[Line], basis: BasisLabel) -> Tuple[Tuple[ModInt, ...], Tuple[int, ...]]:
    branches = branch_table(d, preparation, basis)
    return tuple(m for m, _, _ in branches), cumulative_weights([p for _, p, _ in branches])


@lru_cache(maxsize=None)
def _alice_sampler(d: int, preparation: Optional[Line], basis: BasisLabel,
                   m: ModInt) -> Tuple[Tuple[Line, ...], Tuple[int, ...]]:
    distribution = outcome_table(d, preparation, basis, m)
    return tuple(j for j, _ in distribution), cumulative_weights([p for _, p in distribution])


def mkp_deduce(alice: AliceOutcome, basis: BasisLabel) -> ModInt:
    """The row of Alice's line in column b."""
    return row_at(alice.line, basis)


def track_deduce(prepared: Line, alice: AliceOutcome) -> Union[BasisLabel, Undetermined]:
    """b = (m0'' - m0)/(m_dd - m_dd'); ö when only m0 moved; undetermined when nothing did."""
    if alice.m_dd != prepared.m_dd:
        return BasisLabel.standard((alice.m0 - prepared.m0) / (prepared.m_dd - alice.m_dd))
    if alice.m0 != prepared.m0:
        return BasisLabel.cb()
    return UNDETERMINED


@dataclass(frozen=True)
class TrialTask:
    protocol: Protocol
    d: int
    seed: int
    policy: BasisPolicy
    line: Optional[Line] = None


def _preparation(task: TrialTask) -> Optional[Line]:
    return None if task.protocol is Protocol.MKP else task.line


def run_trial(task: TrialTask, trial: int) -> MeasurementRecord:
    """One round of either protocol, on the trial's own random stream.

    Draws match king_measure then alice_measure on the prepared state.
    """
    rng = trial_generator(task.seed, trial)
    dim = as_dimension(task.d)
    preparation = _preparation(task)
    basis = task.policy.choose(dim, rng)
    outcomes, cumulative = _king_sampler(dim.d, preparation, basis)
    m = outcomes[sample_cumulative(rng, cumulative)]
    lines, cumulative = _alice_sampler(dim.d, preparation, basis, m)
    j = lines[sample_cumulative(rng, cumulative)]
    alice = AliceOutcome(j.m_dd, j.m0)
    if task.protocol is Protocol.MKP:
        deduction = mkp_deduce(alice, basis)
    else:
        deduction = track_deduce(task.line, alice)
    return MeasurementRecord(task.protocol, trial, task.line, KingChoice(basis, m), alice, deduction)


def _run_indexed(args: Tuple[TrialTask, int]) -> MeasurementRecord:
    return run_trial(*args)


def _records(task: TrialTask, trials: int, workers: int, progress: bool) -> Iterable[MeasurementRecord]:
    jobs = ((task, t) for t in range(trials))
    bar = dict(total=trials, desc=f"{task.protocol.value} d={task.d}", disable=not progress, file=sys.stderr)
    if workers > 1:
        chunk = max(1, trials // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as executor:
            yield from tqdm(executor.map(_run_indexed, jobs, chunksize=chunk), **bar)
        return
    yield from tqdm(map(_run_indexed, jobs), **bar)


def _fraction_text(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _exact_rates(masses: Dict[str, Dict[str, Fraction]], policy: BasisPolicy, dim: Dimension) -> Dict[str, Any]:
    """Verdict probabilities under the policy, from exhaustive branch masses."""
    bases = [str(b) for b in policy.bases(dim)]
    weight = Fraction(1, len(bases))
    totals = {v.value: Fraction(0) for v in Verdict}
    for b in bases:
        for verdict, mass in masses[b].items():
            totals[verdict] += weight * mass
    return {k: _fraction_text(v) for k, v in totals.items()}


def _simulate(task: TrialTask, trials: int, masses: Dict[str, Dict[str, Fraction]], workers: int,
              progress: bool, transcript: bool) -> SimReport:
    if trials < 1:
        raise ConfigError(f"trials must be at least 1, got {trials}")
    if workers < 1:
        raise ConfigError(f"workers must be at least 1, got {workers}")
    dim = as_dimension(task.d)
    report = SimReport(task.d, task.protocol, trials, task.seed, task.policy.describe(), line=task.line)
    report.exact = _exact_rates(masses, task.policy, dim)
    rows = [] if transcript else None
    for record in _records(task, trials, workers, progress):
        report.add(record)
        if rows is not None:
            rows.append(record.to_json())
    report.transcript = rows
    report.per_basis = dict(sorted(report.per_basis.items()))
    logger.info(f"{task.protocol.value} d={task.d}: {report.success_count}/{trials} correct, "
                f"{report.undetermined_count} undetermined, {report.error_count} errors")
    return report


def run_mkp(d: Union[int, Dimension], trials: int, seed: Optional[int] = None,
            b_policy: Optional[BasisPolicy] = None, workers: int = 1, progress: bool = False,
            transcript: bool = False) -> SimReport:
    dim = as_dimension(d)
    policy = b_policy or BasisPolicy()
    task = TrialTask(Protocol.MKP, dim.d, resolve_seed(seed), policy)
    masses = _mkp_masses(dim, policy.bases(dim), VerificationReport("mkp", dim.d))
    return _simulate(task, trials, masses, workers, progress, transcript)


def run_track(d: Union[int, Dimension], line: Line, trials: int, seed: Optional[int] = None,
              b_policy: Optional[BasisPolicy] = None, workers: int = 1, progress: bool = False,
              transcript: bool = False) -> SimReport:
    dim = as_dimension(d)
    if line.dim != dim:
        raise ConfigError(f"line {line} does not live in dimension {dim.d}")
    policy = b_policy or BasisPolicy()
    task = TrialTask(Protocol.TRACK, dim.d, resolve_seed(seed), policy, line)
    masses = _track_masses(dim, line, policy.bases(dim), VerificationReport("track", dim.d))
    return _simulate(task, trials, masses, workers, progress, transcript)


def _empty_masses() -> Dict[str, Fraction]:
    return {v.value: Fraction(0) for v in Verdict}


def _mkp_masses(dim: Dimension, bases: Iterable[BasisLabel], report: VerificationReport) -> Dict[str, Dict[str, Fraction]]:
    one_over_d = Fraction(1, dim.d)
    masses = {}
    for b in bases:
        cell = _empty_masses()
        for m, p_king, post in branch_table(dim.d, None, b):
            report.check(p_king == one_over_d, lambda: f"King outcome {m.value} in basis {b} has probability {p_king}")
            if post is None:
                continue
            point = Point(m, b)
            report.check(states_equal(post, point_state(point).ket), lambda: f"post-King state for {point} is not |A_{point}>")
            feasible = set(lines_through_point(point))
            for j, p_alice in outcome_table(dim.d, None, b, m):
                expected = one_over_d if j in feasible else 0
                report.check(p_alice == expected, lambda: f"Alice outcome {j} after {point} has probability {p_alice}")
                if not p_alice:
                    continue
                record = MeasurementRecord(Protocol.MKP, 0, None, KingChoice(b, m),
                                           AliceOutcome(j.m_dd, j.m0), mkp_deduce(AliceOutcome(j.m_dd, j.m0), b))
                report.check(record.verdict is Verdict.CORRECT, lambda: f"MKP deduced {record.deduction} on branch {point}, {j}")
                cell[record.verdict.value] += p_king * p_alice
                report.details['branches'] = report.details.get('branches', 0) + 1
        report.check(sum(cell.values()) == 1, lambda: f"basis {b}: total mass {sum(cell.values())}")
        masses[str(b)] = cell
    return masses


def _track_masses(dim: Dimension, line: Line, bases: Iterable[BasisLabel],
                  report: VerificationReport) -> Dict[str, Dict[str, Fraction]]:
    one_over_d = Fraction(1, dim.d)
    masses = {}
    for b in bases:
        cell = _empty_masses()
        for m, p_king, post in branch_table(dim.d, line, b):
            report.check(p_king == one_over_d, lambda: f"line {line}: King outcome {m.value} in basis {b} has probability {p_king}")
            if post is None:
                continue
            for j, p_alice in outcome_table(dim.d, line, b, m):
                if b.is_cb:
                    feasible = j.m_dd == line.m_dd
                else:
                    feasible = j.m0 - line.m0 == b.b * (line.m_dd - j.m_dd)
                report.check(p_alice == (one_over_d if feasible else 0),
                             lambda: f"line {line}, King ({m.value},{b}): Alice outcome {j} has probability {p_alice}")
                if not p_alice:
                    continue
                alice = AliceOutcome(j.m_dd, j.m0)
                record = MeasurementRecord(Protocol.TRACK, 0, line, KingChoice(b, m), alice, track_deduce(line, alice))
                report.check(record.verdict is not Verdict.ERROR,
                             lambda: f"line {line}: deduced {record.deduction} but the King used {b}")
                cell[record.verdict.value] += p_king * p_alice
                report.details['branches'] = report.details.get('branches', 0) + 1
        report.check(sum(cell.values()) == 1, lambda: f"line {line}, basis {b}: total mass {sum(cell.values())}")
        report.check(cell[Verdict.UNDETERMINED.value] == one_over_d,
                     lambda: f"line {line}, basis {b}: undetermined mass {cell[Verdict.UNDETERMINED.value]}")
        masses[str(b)] = cell
    return masses


def _masses_json(masses: Dict[str, Dict[str, Fraction]]) -> Dict[str, Dict[str, str]]:
    return {b: {k: _fraction_text(v) for k, v in cell.items()} for b, cell in masses.items()}


def enumerate_mkp(d: Union[int, Dimension]) -> VerificationReport:
    """Every (b, King m, Alice line) branch with nonzero probability; all must retrodict m."""
    dim = as_dimension(d)
    report = VerificationReport("protocols.mkp", dim.d)
    masses = _mkp_masses(dim, basis_labels(dim), report)
    report.details['masses'] = _masses_json(masses)
    return report


def enumerate_track(d: Union[int, Dimension], lines: Optional[Iterable[Line]] = None) -> VerificationReport:
    """Exhaustive tracking oracle over the given prepared lines (all d**2 by default)."""
    dim = as_dimension(d)
    report = VerificationReport("protocols.track", dim.d)
    targets = list(all_lines(dim) if lines is None else lines)
    per_line = {}
    for line in targets:
        masses = _track_masses(dim, line, basis_labels(dim), report)
        per_line[str(line)] = _masses_json(masses)
    report.details['masses'] = per_line
    return report


def verify_protocols(d: Union[int, Dimension], lines: Optional[Iterable[Line]] = None) -> VerificationReport:
    dim = as_dimension(d)
    report = VerificationReport("protocols", dim.d)
    for part in (enumerate_mkp(dim), enumerate_track(dim, lines)):
        report.merge(part)
        report.details[part.name] = {'passed': part.passed, 'checks': part.checks}
    return report
