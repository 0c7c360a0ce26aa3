# simoe/errors.py
"""Exceptions raised by simoe.

It contains the following classes:
    - `SimoeError` - Base class of every simoe exception.
    - `ShapeError` - Operands with non conformable shapes.
    - `GateError` - Gate probabilities that are not a distribution.
    - `ConfigError` - Invalid configuration value, names the offending field.
    - `PropertyFailure` - An oracle property that does not hold.
"""


class SimoeError(Exception):
    """Base class of simoe exceptions."""


class ShapeError(SimoeError, ValueError):
    """Dimension mismatch between operands.

    Attributes:
        op: Name of the failing operation.
        shapes: Shapes of the operands.
    """

    def __init__(self, op: str, *shapes: tuple):
        self.op = op
        self.shapes = shapes
        shapes_str = " and ".join(str(tuple(shape)) for shape in shapes)
        super().__init__(f"{op}: shapes {shapes_str} are not aligned")


class GateError(SimoeError, ValueError):
    """Gate output is not a probability vector."""


class ConfigError(SimoeError, ValueError):
    """Invalid configuration.

    Attributes:
        field: Dotted path of the offending field.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class PropertyFailure(SimoeError, AssertionError):
    """A verified property does not hold.

    Attributes:
        name: Property name.
    """

    def __init__(self, name: str, message: str):
        self.name = name
        super().__init__(f"{name}: {message}")
