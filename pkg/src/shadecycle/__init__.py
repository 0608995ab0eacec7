"""shadecycle: unpaired joint training of a deferred neural shading network and
an intrinsic decomposition network, with dual cycle losses and shared
adversarial discriminators."""

__version__ = "0.1.0"
