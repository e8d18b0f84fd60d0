from errors import ConfigError


def scripted_decide(list_script, int_period):
    """Replays a fixed list of decisions; past its end the last entry repeats.

    Raises
    ----------
    ConfigError
        If the script is empty.
    """
    if not list_script:
        raise ConfigError("Scripted agent has an empty script")
    return list_script[min(int_period, len(list_script) - 1)]
