"""Three-valued verdicts shared by analyzers, solvers, and the CLI.

A verdict is Holds, Fails, or Inconclusive.  Inconclusive means the
tracked precision window was too small to decide; it is never conflated
with Fails.
"""

from dataclasses import dataclass, field

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    name: str
    status: str
    detail: str = ""
    window: int | None = None
    data: dict = field(default_factory=dict)

    def to_json(self):
        out = {"name": self.name, "status": self.status, "detail": self.detail}
        if self.window is not None:
            out["window"] = self.window
        if self.data:
            out["data"] = self.data
        return out


def holds(name, detail="", window=None, **data):
    return Verdict(name, HOLDS, detail, window, data)


def fails(name, detail="", window=None, **data):
    return Verdict(name, FAILS, detail, window, data)


def inconclusive(name, detail="", window=None, **data):
    return Verdict(name, INCONCLUSIVE, detail, window, data)
