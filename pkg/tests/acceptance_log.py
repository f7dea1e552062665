"""Per-criterion outcome lines collected by the acceptance suite."""

RESULTS: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    RESULTS[criterion] = (ok, detail)
    print(line(criterion))


def line(criterion: int) -> str:
    ok, detail = RESULTS[criterion]
    return f"criterion {criterion}: {'PASS' if ok else 'FAIL'} ({detail})"
