# File: presets.py
"""
Named run configurations.

Every preset uses the standard emitter pair: 'H' configuration at
r = 0.0357 lambda with alpha = 0.3, i.e. Omega12 = 20 and gamma12 = 0.3.
"""

from typing import Dict, List

from run_config import ConfigError, RunConfig, parse_config

PRESETS: Dict[str, str] = {
    "fig2a": """\
# Excitation spectra versus dephasing, Omega_R = 4
scenario: spectrum
rabi: 4.0
delta: 5.0
detuning: [-40.0, 40.0, 161]
gamma_star: [0.1, 50.0, 40 log]
""",
    "fig2b": """\
# Excitation spectra versus dephasing, Omega_R = 10
scenario: spectrum
rabi: 10.0
delta: 5.0
detuning: [-40.0, 40.0, 161]
gamma_star: [0.1, 50.0, 40 log]
""",
    "fig2c": """\
# Saturation curves at omega = omega0
scenario: saturation
delta: 5.0
rabi: [0.05, 100.0, 80 log]
gamma_star: {values: [0.0, 3.0, 11.8, 30.0]}
""",
    "fig3a": """\
# g2(0) map, drive on the two-photon transition
scenario: g2map
excitation: two_photon
rabi: [0.1, 20.0, 50 log]
gamma_star: [0.1, 100.0, 50 log]
""",
    "fig3d": """\
# g2(0) map, drive on the |G> -> |S> transition
scenario: g2map
excitation: superradiant
rabi: [0.1, 100.0, 50 log]
gamma_star: [0.1, 300.0, 50 log]
""",
    "fig4a": """\
# n_exc(t) from |A>
scenario: decay
initial_state: A
time: [0.0, 10.0, 201]
gamma_star: {values: [0.0, 0.5, 2.0, 5.0]}
""",
    "fig4d": """\
# n_exc(t) from |S>
scenario: decay
initial_state: S
time: [0.0, 10.0, 201]
gamma_star: {values: [0.0, 0.5, 2.0, 5.0]}
""",
    "fig4b": """\
# G1 spectrogram from |A>, no dephasing
scenario: g1spec
initial_state: A
gamma_star: 0.0
phi: 1.5707963267948966
time: [0.0, 5.0, 51]
omega: [-40.0, 40.0, 321]
""",
    "fig4c": """\
# G1 spectrogram from |A>, gamma_star = 2
scenario: g1spec
initial_state: A
gamma_star: 2.0
phi: 1.5707963267948966
time: [0.0, 5.0, 51]
omega: [-40.0, 40.0, 321]
""",
    "fig4e": """\
# G1 spectrogram from |S>, no dephasing
scenario: g1spec
initial_state: S
gamma_star: 0.0
time: [0.0, 5.0, 51]
omega: [-40.0, 40.0, 321]
""",
    "fig4f": """\
# G1 spectrogram from |S>, gamma_star = 2
scenario: g1spec
initial_state: S
gamma_star: 2.0
time: [0.0, 5.0, 51]
omega: [-40.0, 40.0, 321]
""",
    "fig5a": """\
# n_exc(t) from |E> with the independent-emitter reference
scenario: decay
initial_state: E
independent_reference: true
time: [0.0, 10.0, 201]
gamma_star: {values: [0.0, 0.5, 2.0, 10.0, 50.0]}
""",
    "fig5b": """\
# g2(t, t) from |E> against the independent pair, detection along and across the emitter axis
scenario: g2time
initial_state: E
independent_reference: true
phi: [parallel, perpendicular]
time: [0.0, 10.0, 201]
gamma_star: {values: [0.0, 0.5, 2.0, 10.0, 50.0]}
""",
    "fig5c": """\
# g2(t, t) from |E>, log-spaced times to resolve the early dip
scenario: g2time
initial_state: E
independent_reference: true
phi: [parallel, perpendicular]
time: [0.001, 10.0, 200 log]
gamma_star: {values: [0.0, 0.5, 2.0, 10.0, 50.0]}
""",
}


class UnknownPresetError(ConfigError):
    pass


def preset_names() -> List[str]:
    return list(PRESETS)


def preset_description(name: str) -> str:
    """First comment line of the preset text."""
    first = PRESETS[name].splitlines()[0]
    return first.lstrip("# ").strip()


def load_preset(name: str) -> RunConfig:
    """
    Raises:
        UnknownPresetError: If no preset has this name.
    """
    if name not in PRESETS:
        raise UnknownPresetError(f"unknown preset '{name}', available: {', '.join(PRESETS)}", "preset")
    return parse_config(PRESETS[name])
