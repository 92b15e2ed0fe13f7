#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""report module validates and writes run reports and prediction tables.

Every report is written twice from the same validated dictionary:
`<base>.json`, one structured document, and `<base>.txt`, sorted
`key=value` lines with flattened dotted keys and JSON-encoded values."""

import csv
import json
import logging
import os

from cerberus import Validator

from .schema import report_schema, required_on_success

logger = logging.getLogger(__name__)


class ReportInvalidException(Exception):
    """Exception raised when a report does not match the report schema.

    Attributes:
        errors - errors found in the report
    """

    def __init__(self, errors):
        super().__init__(f"Report was invalid. Errors: {errors}.")

        self.errors = errors


def validate_report(document):
    """Checks a report against report_schema and the per-command success fields"""
    validator = Validator(report_schema)
    if not validator.validate(document):
        raise ReportInvalidException(validator.errors)
    if document["status"] == "ok":
        missing = [key for key in required_on_success.get(document["command"], []) if key not in document]
        if missing:
            raise ReportInvalidException({key: ["required when status is 'ok'"] for key in missing})
    return document


def flatten(document, prefix=""):
    """Flattens nested dicts and lists into a dict of dotted keys
    :param document: dict or list to flatten
    :param prefix: key prefix of document inside its parent
    Returns:
        flat: dict mapping dotted keys to scalar values
    """
    flat = {}
    items = document.items() if isinstance(document, dict) else enumerate(document)
    for key, value in items:
        name = f"{prefix}{key}"
        if isinstance(value, (dict, list)) and value:
            flat.update(flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def report_paths(path):
    base, extension = os.path.splitext(path)
    if extension not in (".json", ".txt"):
        base = path
    return f"{base}.json", f"{base}.txt"


def write_report(document, path):
    """Validates the report, then writes its .json and .txt forms next to `path`"""
    validate_report(document)
    json_path, text_path = report_paths(path)
    with open(json_path, "w", encoding="utf-8") as stream:
        json.dump(document, stream, indent=2, sort_keys=True)
        stream.write("\n")
    with open(text_path, "w", encoding="utf-8") as stream:
        for key, value in sorted(flatten(document).items()):
            stream.write(f"{key}={json.dumps(value)}\n")
    logger.info("Wrote %s report to %s and %s", document["status"], json_path, text_path)
    return json_path, text_path


def read_report(path):
    json_path, _ = report_paths(path)
    with open(json_path, encoding="utf-8") as stream:
        return validate_report(json.load(stream))


def _write_prediction_rows(stream, prediction, truths):
    writer = csv.writer(stream)
    writer.writerow(["mean", "variance"] + (["truth"] if truths is not None else []))
    for index in range(len(prediction)):
        row = [repr(float(prediction.mean[index])), repr(float(prediction.variance[index]))]
        if truths is not None:
            row.append(repr(float(truths[index])))
        writer.writerow(row)


def write_predictions(path, prediction, truths=None):
    """Writes one row per query point: mean, variance and optionally the truth
    :param path: file path, or an open text stream such as sys.stdout
    :param prediction: Prediction with mean and variance arrays
    :param truths: optional observed responses, same length as prediction
    """
    if hasattr(path, "write"):
        _write_prediction_rows(path, prediction, truths)
        return
    with open(path, "w", newline="", encoding="utf-8") as stream:
        _write_prediction_rows(stream, prediction, truths)
    logger.info("Wrote %s predictions to %s", len(prediction), path)


def _write_table_rows(stream, rows):
    writer = csv.DictWriter(stream, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)


def write_table(path, rows):
    """Writes a list of dicts with identical keys as a CSV table, to a path or stream"""
    if not rows:
        raise ValueError("Nothing to write")
    if hasattr(path, "write"):
        _write_table_rows(path, rows)
        return
    with open(path, "w", newline="", encoding="utf-8") as stream:
        _write_table_rows(stream, rows)
    logger.info("Wrote %s rows to %s", len(rows), path)
