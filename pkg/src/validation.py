from dataclasses import dataclass, field


@dataclass
class ValidationReport:
    """Outcome of a pure check: ok, or the violations found (first one is the witness)."""

    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    @property
    def first(self):
        return self.violations[0] if self.violations else None

    def fail(self, message):
        self.violations.append(message)

    def to_dict(self):
        return {"ok": self.ok, "violations": list(self.violations)}

    def __bool__(self):
        return self.ok
