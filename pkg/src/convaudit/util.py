from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal


def pct_half_up(count: int, total: int) -> int:
    """Integer percentage with exact half-up rounding (0.5 rounds to 1)."""
    if total == 0:
        return 0
    return int(
        (Decimal(count) * 100 / Decimal(total)).quantize(Decimal("1"), rounding=ROUND_HALF_UP)
    )


def render_columns(headers: list[str], rows: list[list[str]]) -> str:
    """Fixed-width text table; shared by the report renderers."""
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip(),
        "  ".join("-" * widths[i] for i in range(len(headers))),
    ]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"
