"""JSON schema of CLI reports.

Every report carries the same envelope; the ``verdicts``, ``certificates``
and ``series`` payloads are command specific.  Rationals are written as
strings such as ``"1/4096"``; non-finite floats as ``"inf"`` / ``"nan"``.
"""

SCHEMA_VERSION = "1.0"

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "orbitfix run report",
    "type": "object",
    "required": ["schema_version", "version", "command", "config", "verdicts", "certificates",
                 "series", "exit_code", "status", "wall_time"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "version": {"type": "string"},
        "command": {"enum": ["verify-finite", "descend", "gallery", "audit", "remetrize"]},
        "config": {"type": "object"},
        "verdicts": {"type": "object"},
        "certificates": {"type": "object"},
        "series": {
            "type": "object",
            "description": "CSV-ready series; orbit_dump rows are tab-separated index, point, f-value, p_sup",
            "additionalProperties": {"type": ["array", "null"]},
        },
        "exit_code": {"enum": [0, 1]},
        "status": {"enum": ["ok", "violation"]},
        "wall_time": {"type": "number", "minimum": 0},
    },
}
