"""CSV emission with a fixed numeric format (17 significant digits, LF endings)."""
from __future__ import annotations

import csv
import io
import math

import numpy as np


def fmt(x):
    """Render one cell: integers verbatim, reals with 17 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        # normalize negative zero so reruns cannot differ by sign of zero
        return f"{x + 0.0:.17g}" if x != 0 else "0"
    return str(x)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def points_csv(z, masses=None):
    """Point cloud as ``re, im[, mass]``."""
    z = np.asarray(z, complex)
    if masses is None:
        return csv_text(["re", "im"], [(p.real, p.imag) for p in z])
    return csv_text(["re", "im", "mass"], [(p.real, p.imag, m) for p, m in zip(z, masses)])
