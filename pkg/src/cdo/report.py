"""Structured results for identity suites.

A CheckReport is a flat list of (identity id, status, witness) entries; a
witness is the printed symbolic discrepancy, never a bare boolean.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckItem:
    ident: str
    passed: bool
    witness: str | None = None

    def to_dict(self):
        d = {"id": self.ident, "status": "pass" if self.passed else "fail"}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class CheckReport:
    name: str
    items: list = field(default_factory=list)

    def record(self, ident: str, passed: bool, witness=None):
        if passed:
            self.items.append(CheckItem(ident, True))
        else:
            self.items.append(CheckItem(ident, False, str(witness) if witness is not None else None))
        return passed

    def check_zero(self, ident: str, value):
        """Record pass iff `value` is the zero of its kind; witness is the value."""
        ok = value.is_zero() if hasattr(value, "is_zero") else not value
        return self.record(ident, ok, None if ok else value)

    def extend(self, other: "CheckReport"):
        self.items.extend(other.items)

    @property
    def ok(self) -> bool:
        return all(it.passed for it in self.items)

    @property
    def failures(self):
        return [it for it in self.items if not it.passed]

    def to_dict(self):
        return {
            "name": self.name,
            "ok": self.ok,
            "items": [it.to_dict() for it in self.items],
        }

    def summary(self) -> str:
        n = len(self.items)
        bad = len(self.failures)
        head = "%s: %d/%d passed" % (self.name, n - bad, n)
        if bad:
            head += "".join(
                "\n  FAIL %s: %s" % (it.ident, it.witness or "") for it in self.failures
            )
        return head
