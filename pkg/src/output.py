"""
Report writers
CSV and JSON files are written to a temporary file in the target directory and renamed into
place, so a failed command never leaves a partial file behind.
"""
import csv
import io
import json
import logging
import os
import tempfile

import numpy as np

from config import CSV_DIGITS, SCHEMA_VERSION

logger = logging.getLogger(__name__)


def format_number(value):
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{CSV_DIGITS}g}"
    return str(value)


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def atomic_write(path, text):
    """Write text to path via a temporary sibling file and os.replace."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.tmp-', suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, 'w', newline='') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    logger.info(f"wrote {path}")


def csv_text(header, rows, comments=()):
    buffer = io.StringIO()
    for line in comments:
        buffer.write(f"# {line}\r\n")
    writer = csv.writer(buffer)    # RFC 4180: CRLF line endings
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    return buffer.getvalue()


def write_csv(path, header, rows, comments=()):
    atomic_write(path, csv_text(header, rows, comments))


def json_text(payload):
    body = {'schema_version': SCHEMA_VERSION}
    body.update(payload)
    return json.dumps(body, indent=2, default=_json_default, allow_nan=True) + '\n'


def write_json(path, payload):
    atomic_write(path, json_text(payload))


def read_csv(path):
    """
    Read a CSV written by write_csv

    Returns:
        tuple: (comments as a dict of key=value pairs, header, rows of strings)
    """
    comments, lines = {}, []
    with open(path, newline='') as f:
        for line in f:
            if line.startswith('#'):
                key, _, value = line[1:].strip().partition('=')
                comments[key.strip()] = value.strip()
            else:
                lines.append(line)
    reader = csv.reader(lines)
    header = next(reader)
    return comments, header, [row for row in reader if row]
