"""
Run configuration file reader.

The file is sectioned ``key = value`` text:

    [model]       A, mu_bar_i, k_bar_i, b_bar_i, u_star, mu_file_i, k_file_i,
                  b_file_i, k_form_i, k_center_i, k_width_i
    [control]     c1, c2, theta, sigma_i, gamma_slack, feedback
    [grid]        N_a, T_final, dt_policy
    [simulation]  snapshots, solver

Missing kernel coefficients fall back to the harvesting example values.
Table paths are resolved relative to the config file.
"""

import configparser
import logging
import os
from typing import Any, Dict, Optional

from pydantic import ValidationError

from equilibrium.steady_state import assemble_equilibrium
from ingest.tables import load_kernel_table
from kernels import KernelForm, KernelSpec
from model.configuration import ModelConfig
from model.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_COEFFICIENTS = {"mu_bar": 0.5, "k_bar": 3.0, "b_bar": 0.4}

_PER_SPECIES = ("mu_bar", "k_bar", "b_bar", "mu_file", "k_file", "b_file", "k_form", "k_center", "k_width")
ALLOWED_KEYS = {
    "model": {"A", "u_star"} | {f"{name}_{i}" for name in _PER_SPECIES for i in (1, 2)},
    "control": {"c1", "c2", "theta", "sigma_1", "sigma_2", "gamma_slack", "feedback"},
    "grid": {"N_a", "T_final", "dt_policy"},
    "simulation": {"snapshots", "solver"},
}
_FLOAT_KEYS = {"A", "u_star", "c1", "c2", "theta", "sigma_1", "sigma_2", "gamma_slack", "T_final"} | {
    f"{name}_{i}" for name in ("mu_bar", "k_bar", "b_bar", "k_center", "k_width") for i in (1, 2)
}


def _number(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}: not a number: {raw!r}") from None


def _integer(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}: not an integer: {raw!r}") from None


def read_sections(file_path: str) -> Dict[str, Dict[str, Any]]:
    """Parse the file into typed per-section values; unknown sections or keys are errors."""
    if not os.path.isfile(file_path):
        raise ConfigError(f"config file not found: {file_path}")
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            parser.read_file(f)
    except configparser.Error as e:
        raise ConfigError(f"cannot parse {file_path}: {e}") from e

    sections: Dict[str, Dict[str, Any]] = {name: {} for name in ALLOWED_KEYS}
    for section in parser.sections():
        if section not in ALLOWED_KEYS:
            raise ConfigError(f"unknown section [{section}] in {file_path}")
        for key, raw in parser.items(section):
            if key not in ALLOWED_KEYS[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")
            raw = raw.strip()
            if key in _FLOAT_KEYS:
                value: Any = _number(section, key, raw)
            elif key == "N_a":
                value = _integer(section, key, raw)
            elif key == "snapshots":
                value = tuple(_number(section, key, t) for t in raw.split(",") if t.strip())
            else:
                value = raw
            sections[section][key] = value
    return sections


def _kernel_specs(model: Dict[str, Any], base_dir: str) -> Dict[str, tuple]:
    def table(key: str) -> Optional[KernelSpec]:
        path = model.get(key)
        if path is None:
            return None
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        return KernelSpec.from_table(*load_kernel_table(path))

    def coefficient(name: str, i: int) -> float:
        return model.get(f"{name}_{i}", DEFAULT_COEFFICIENTS[name])

    mortality, birth, interaction = [], [], []
    for i in (1, 2):
        mortality.append(table(f"mu_file_{i}") or KernelSpec(KernelForm.EXP_GROWTH, (coefficient("mu_bar", i),)))

        form = model.get(f"k_form_{i}", KernelForm.EXP_DECAY.value)
        birth_table = table(f"k_file_{i}")
        if birth_table is not None:
            birth.append(birth_table)
        elif form == KernelForm.GAUSSIAN.value:
            A = model.get("A", 1.0)
            birth.append(KernelSpec(KernelForm.GAUSSIAN, (
                coefficient("k_bar", i), model.get(f"k_center_{i}", 0.5 * A), model.get(f"k_width_{i}", 0.2 * A),
            )))
        elif form == KernelForm.EXP_DECAY.value:
            birth.append(KernelSpec(KernelForm.EXP_DECAY, (coefficient("k_bar", i),)))
        else:
            raise ConfigError(f"model.k_form_{i}: unsupported birth kernel form {form!r}")

        interaction.append(table(f"b_file_{i}") or KernelSpec(KernelForm.PARABOLIC, (coefficient("b_bar", i),)))
    return {"mortality": tuple(mortality), "birth": tuple(birth), "interaction": tuple(interaction)}


def validation_message(error: ValidationError) -> str:
    """One line per failed field, without pydantic's type prefixes."""
    messages = []
    for item in error.errors():
        message = str(item.get("msg", "")).replace("Value error, ", "")
        location = ".".join(str(part) for part in item.get("loc", ()))
        messages.append(f"{location}: {message}" if location else message)
    return "; ".join(messages)


def build_config(sections: Dict[str, Dict[str, Any]], base_dir: str = ".") -> ModelConfig:
    model = sections.get("model", {})
    values: Dict[str, Any] = _kernel_specs(model, base_dir)
    if "A" in model:
        values["A"] = model["A"]
    if "u_star" in model:
        values["u_star"] = model["u_star"]
    values.update(sections.get("control", {}))
    values.update(sections.get("grid", {}))
    values.update(sections.get("simulation", {}))
    try:
        return ModelConfig(**values)
    except ValidationError as e:
        raise ConfigError(validation_message(e)) from e


def load_config(file_path: str, check_equilibrium: bool = True) -> ModelConfig:
    """Read, validate and (by default) check that a positive equilibrium exists.

    Raises ConfigError for parse or field errors and EquilibriumError when
    u_star is not below zeta_2.
    """
    sections = read_sections(file_path)
    config = build_config(sections, os.path.dirname(os.path.abspath(file_path)))
    if check_equilibrium:
        assemble_equilibrium(config)
    logger.info("loaded config %s (N_a=%d, T_final=%g)", file_path, config.N_a, config.T_final)
    return config
