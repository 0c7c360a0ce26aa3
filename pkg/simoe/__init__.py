# simoe/__init__.py

"""SIMOE: SImulated Mixture-of-Experts end-cloud pipeline.

Simulate Mixture-of-Experts inference split between an end device and the cloud.

Modules exported by this package:
    - `simoe`: Provide experiment classes, Experiment and ExperimentMatrix.
    - `sim`: Provide the discrete-event simulator and its link model.
    - `config`: Provide configuration loading and validation.
    - `gate`: Provide hardware-aware local expert selection and the grouped gate.
    - `moe`: Provide the toy Mixture-of-Experts model.
    - `codec`: Provide the low-rank feature codec.
    - `sched`: Provide End/Cloud task placement.
    - `linalg`: Provide the linear algebra kernel.
    - `verify`: Provide the property suite run by `simoe verify`.
    - `cli`: Provide the command line interface.
    - `user`: Provide functions to check save path and write manifests.
"""

__version__ = "0.1.0"
