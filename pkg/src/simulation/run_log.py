"""Append-only JSON-lines run log.

The first line is a header object carrying the schema version, run id, config
digest, market model, roster and the precision used for rendered histories.
Every following line is one period record, flushed as soon as it is written.
"""
import json
import logging
import os

from errors import SchemaVersionError
from objects.market import derive_model, spec_from_dict
from objects.run_records import record_from_dict, record_to_dict

logger = logging.getLogger(__name__)

INT_SCHEMA_VERSION = 1


def _dumps(dict_obj):
    return json.dumps(dict_obj, sort_keys=True, separators=(",", ":"))


class RunLogWriter:
    """Context manager writing one run log."""

    def __init__(self, str_path, dict_header):
        self.str_path = str_path
        self.dict_header = dict(dict_header, schema_version=INT_SCHEMA_VERSION)
        self._fp = None

    def __enter__(self):
        str_dir = os.path.dirname(self.str_path)
        if str_dir:
            os.makedirs(str_dir, exist_ok=True)
        self._fp = open(self.str_path, "w", encoding="utf-8", newline="\n")
        self._fp.write(_dumps(self.dict_header) + "\n")
        self._fp.flush()
        return self

    def append(self, record):
        self._fp.write(_dumps(record_to_dict(record)) + "\n")
        self._fp.flush()
        os.fsync(self._fp.fileno())

    def __exit__(self, exc_type, exc, tb):
        if self._fp is not None:
            self._fp.close()
            self._fp = None
        return False


def load_run_log(str_path):
    """Reads a run log.

    Returns
    ----------
    dict_header : dict
    model : MarketModel
        Re-derived from the market spec stored in the header.
    list_history : list(PeriodRecord)

    Raises
    ----------
    SchemaVersionError
        If the header is missing or carries another schema version.
    """
    with open(str_path, "r", encoding="utf-8") as fp:
        list_lines = [str_line for str_line in fp.read().splitlines() if str_line.strip()]
    if not list_lines:
        raise SchemaVersionError("Empty run log: " + str_path)
    dict_header = json.loads(list_lines[0])
    int_version = dict_header.get("schema_version")
    if int_version != INT_SCHEMA_VERSION:
        raise SchemaVersionError(
            f"{str_path} has schema version {int_version}, expected {INT_SCHEMA_VERSION}")
    model = derive_model(spec_from_dict(dict_header["market"]))
    list_history = [record_from_dict(json.loads(str_line)) for str_line in list_lines[1:]]
    logger.debug("Loaded %d periods from %s", len(list_history), str_path)
    return dict_header, model, list_history
