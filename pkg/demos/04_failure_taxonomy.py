#!/usr/bin/env python3
"""Aggregate the bundled failure-report dataset into distribution tables.

The package ships 200 labeled converter-failure records (see
src/convaudit/data/README.md for how the dataset was assembled).  This
renders the symptom marginal with its display-only reference column and
the per-converter cause-by-symptom cross tables.
"""

from convaudit.taxonomy import (
    bundled_failure_records_path,
    bundled_location_records_path,
    joint,
    marginal,
    parse_records,
)


def main() -> None:
    records = parse_records(bundled_failure_records_path().read_bytes())
    print(f"{len(records)} failure records\n")

    print(marginal(records, "symptom").to_text())
    print()
    print(marginal(records, "cause").to_text())
    print()
    for table in joint(records):
        print(table.to_text())
        print()

    locations = parse_records(bundled_location_records_path().read_bytes())
    print(marginal(locations, "location").to_text())


if __name__ == "__main__":
    main()
