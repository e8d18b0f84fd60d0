import json
import os

import numpy as np

# Dictionary utility

def print_dictionary_recursive(dictionary, depth=0):
    """Prints a dictionary of nested dictionaries on a nice format.

    Parameters
    ----------
    dictionary : dict
        Dictionary to be printed
    depth : int, default=0
        Recursion depth.
    """
    for key in dictionary:
        print(depth*"\t", key, end=': ')
        value = dictionary[key]
        if isinstance(value, dict):
            print()
            print_dictionary_recursive(value, depth + 1)
        else:
            if isinstance(value, np.ndarray):
                print("Numpy-array of length", len(value))
            else:
                print(value)
    return


def to_builtin(value):
    """Converts numpy scalars and arrays (also nested in dicts and lists) to
    plain Python values so they can be written as JSON."""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


# Files

def ensure_directory(str_directory):
    if str_directory:
        os.makedirs(str_directory, exist_ok=True)
    return str_directory


def write_json(dict_content, str_path):
    """Writes sorted, indented JSON ending in a newline."""
    ensure_directory(os.path.dirname(str_path))
    with open(str_path, "w", encoding="utf-8") as fp:
        json.dump(to_builtin(dict_content), fp, indent=2, sort_keys=True)
        fp.write("\n")


# UI

def print_table(list_headers, list_rows, int_width=12):
    """Prints rows under right-aligned headers. Floats get 6 significant digits."""
    def fn_cell(value):
        if isinstance(value, (float, np.floating)):
            return f"{value:>{int_width}.6g}"
        return f"{str(value):>{int_width}}"
    print("".join(fn_cell(h) for h in list_headers))
    print("-" * int_width * len(list_headers))
    for row in list_rows:
        print("".join(fn_cell(v) for v in row))
