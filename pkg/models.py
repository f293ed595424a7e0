"""
Report records produced by the theory checker
"""
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

STATUS_OK = 'ok'
STATUS_FAILED = 'failed'

VERDICT_CONSISTENT = 'consistent'
VERDICT_COUNTEREXAMPLE_FREE = 'counterexample-free'
VERDICT_REFUTED = 'refuted'


@dataclass
class LemmaResult:
    """Outcome of replaying one lemma's proof script"""
    name: str
    status: str
    failed_step: Optional[int] = None
    reason: Optional[str] = None
    millis: float = 0.0
    steps_applied: int = 0

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'name': self.name,
            'status': self.status,
            'millis': round(self.millis, 3),
        }
        if self.failed_step is not None:
            data['failed_step'] = self.failed_step
        if self.reason:
            data['reason'] = self.reason
        return data


@dataclass
class OracleVerdict:
    """Randomized semantic comparison of the two sides of an equation"""
    subject: str
    verdict: str
    trials: int
    seed: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        data = {'subject': self.subject, 'verdict': self.verdict, 'trials': self.trials}
        if self.seed is not None:
            data['seed'] = self.seed
        return data


@dataclass
class ModelVerdict:
    subject: str
    kind: str
    holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return {'subject': self.subject, 'kind': self.kind, 'holds': self.holds}


@dataclass
class CheckReport:
    """Everything the checker learned about one theory file"""
    file: str
    theory: Optional[str] = None
    rules: List[str] = field(default_factory=list)
    lemmas: List[LemmaResult] = field(default_factory=list)
    oracle: Optional[List[OracleVerdict]] = None
    model: Optional[List[ModelVerdict]] = None
    soundness_violations: List[str] = field(default_factory=list)
    created_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.lemmas) and not self.soundness_violations

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'file': self.file,
            'rules': list(self.rules),
            'lemmas': [r.to_dict() for r in self.lemmas],
            'created_at': self.created_at.isoformat(),
        }
        if self.theory:
            data['theory'] = self.theory
        if self.oracle is not None:
            data['oracle'] = [v.to_dict() for v in self.oracle]
        if self.model is not None:
            data['model'] = [v.to_dict() for v in self.model]
        if self.soundness_violations:
            data['soundness_violations'] = list(self.soundness_violations)
        return data
