"""Run configuration: JSON documents with device, solver and experiment blocks."""
import copy
import json
import re

from .device import DeviceParams
from .dynamics import SolverConfig

NS = 1e-9


class ConfigError(ValueError):
    """Invalid configuration; the message names the file and line when known."""


EXPERIMENT_DEFAULTS = {
    "sweep-width": {
        "amplitude": 0.7,
        "widths": [w * NS for w in (0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.6, 3.0,
                                    3.5, 4.0, 5.0, 6.0, 8.0, 10.0, 15.0, 20.0, 25.0, 30.0)],
    },
    "sweep-amplitude": {
        "width": 1.8 * NS,
        "amplitudes": [0.3, 0.4, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 1.0],
    },
    "combined": {
        "u_vcma": 0.7, "w_vcma": 1.8 * NS, "u_stt": 0.6,
        "follow_widths": [w * NS for w in range(1, 11)],
    },
    "half-select": {
        "u_vcma": 0.7, "w_vcma": 1.8 * NS, "u_stt": 0.6,
        "follow_widths": [w * NS for w in range(1, 11)],
    },
    "field-map": {
        "amplitude": 0.7, "grid_n": 36, "cap_angle": 0.5235987755982988,
        "include_stt": False, "precession": False,
    },
    "exit-hist": {
        "amplitude": 0.7, "theta_exit": 0.5235987755982988, "width": 3 * NS, "bins": 36,
    },
    "xbar-write": {
        "rows": 128, "cols": 128, "target": [0, 0], "states": "AP",
        "waveform": [[0.7, 1.8 * NS], [0.6, 9 * NS]], "p_sel": None, "p_half": None,
    },
    "sneak": {
        "rows": 4, "cols": 4, "driven_row": 0, "driven_col": 0, "amplitude": 0.7, "states": "AP",
    },
    "validate": {},
}

TOP_DEFAULTS = {"seed": 0, "n_trials": 4000, "threads": 1, "output": "out"}
#: keys that never change results and are left out of the replay record
NON_REPLAY_KEYS = ("threads", "output")
BLOCKS = ("device", "solver", "experiment")


def default_config(command):
    if command not in EXPERIMENT_DEFAULTS:
        raise ConfigError(f"unknown command {command!r}")
    cfg = dict(TOP_DEFAULTS)
    cfg["device"] = DeviceParams().to_dict()
    cfg["solver"] = SolverConfig().to_dict()
    cfg["experiment"] = copy.deepcopy(EXPERIMENT_DEFAULTS[command])
    return cfg


def _line_of(text, key):
    if text is None:
        return None
    pat = re.compile(r'"%s"\s*:' % re.escape(key))
    for no, line in enumerate(text.splitlines(), 1):
        if pat.search(line):
            return no
    return None


def _where(source, text, key):
    line = _line_of(text, key)
    return f"{source}:{line}" if line else source


def _kind(v):
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, (int, float)):
        return "number"
    if isinstance(v, str):
        return "string"
    if isinstance(v, list):
        return "list"
    if isinstance(v, dict):
        return "object"
    return "null"


def _merge_block(base, data, block, source, text):
    if not isinstance(data, dict):
        raise ConfigError(f"{_where(source, text, block)}: block '{block}' must be an object")
    for key, value in data.items():
        if key not in base:
            raise ConfigError(f"{_where(source, text, key)}: unknown key '{block}.{key}'")
        want = _kind(base[key])
        got = _kind(value)
        # null defaults accept numbers (optional probabilities); demag accepts lists
        if want != "null" and got != "null" and want != got:
            raise ConfigError(f"{_where(source, text, key)}: '{block}.{key}' must be a {want}, got {got}")
        base[key] = value


def merge(cfg, data, source="<config>", text=None):
    """Overlay a parsed document on ``cfg`` in place, rejecting unknown keys."""
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be an object")
    for key, value in data.items():
        if key in BLOCKS:
            _merge_block(cfg[key], value, key, source, text)
        elif key in TOP_DEFAULTS:
            if _kind(value) != _kind(TOP_DEFAULTS[key]):
                raise ConfigError(f"{_where(source, text, key)}: '{key}' must be a {_kind(TOP_DEFAULTS[key])}")
            cfg[key] = value
        elif key == "command":
            continue
        else:
            raise ConfigError(f"{_where(source, text, key)}: unknown key '{key}'")
    return cfg


def load_file(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    try:
        return json.loads(text), text
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def apply_override(cfg, assignment):
    """Apply ``block.key=value`` (value parsed as JSON, else taken as a string)."""
    if "=" not in assignment:
        raise ConfigError(f"--set {assignment!r}: expected key=value")
    path, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = path.strip().split(".")
    doc = value
    for part in reversed(parts):
        doc = {part: doc}
    merge(cfg, doc, source=f"--set {path}")


def resolve(command, config_path=None, overrides=(), seed=None, trials=None, out=None, threads=None):
    """Defaults, then the config file, then ``--set`` overrides, then dedicated flags."""
    cfg = default_config(command)
    text = None
    if config_path:
        data, text = load_file(config_path)
        if isinstance(data, dict) and data.get("command", command) != command:
            raise ConfigError(f"{config_path}: config is for '{data['command']}', not '{command}'")
        merge(cfg, data, str(config_path), text)
    for item in overrides:
        apply_override(cfg, item)
    for key, value in (("seed", seed), ("n_trials", trials), ("output", out), ("threads", threads)):
        if value is not None:
            cfg[key] = value
    try:
        validate(cfg)
    except ConfigError as exc:
        # anchor range errors to the line that set the offending key
        msg = str(exc)
        key = msg.split()[0] if msg else ""
        if config_path and _line_of(text, key):
            raise ConfigError(f"{config_path}:{_line_of(text, key)}: {msg}") from None
        raise
    return cfg


def validate(cfg):
    """Check value ranges and build the typed objects once, before any simulation."""
    try:
        device = DeviceParams.from_dict(cfg["device"])
        solver = SolverConfig.from_dict(cfg["solver"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    if not isinstance(cfg["seed"], int) or cfg["seed"] < 0:
        raise ConfigError("seed must be a non-negative integer")
    if not isinstance(cfg["n_trials"], int) or cfg["n_trials"] < 1:
        raise ConfigError("n_trials must be a positive integer")
    if not isinstance(cfg["threads"], int) or cfg["threads"] < 1:
        raise ConfigError("threads must be a positive integer")
    return device, solver


def replay_record(command, cfg):
    """The part of the resolved config that determines the results."""
    rec = {k: v for k, v in cfg.items() if k not in NON_REPLAY_KEYS}
    rec["command"] = command
    return rec
