"""Built-in density presets.

Four canonical test densities on the unit torus:

* example1 -- one diagonal shock train.
* example2 -- two orthogonal diagonal shock trains (separable product).
* example3 -- two non-orthogonal shock trains (product form, no exact
  separable solution).
* example4 -- a single curved feature defined as a level set of
  Psi(x, y) = y - a sin(2 pi x) - c.
"""

import math

import numpy as np

from .density import LevelSet, ProductTrains, ShockTrain, SingleTrain

SQ2 = math.sqrt(2.0)
SQ5 = math.sqrt(5.0)


def example1():
    train = ShockTrain(amplitude=50.0, sharpness=50.0,
                       direction=np.array([1.0, 1.0]) / SQ2, scale=SQ2)
    return SingleTrain(train)


def example2():
    t1 = ShockTrain(amplitude=50.0, sharpness=50.0,
                    direction=np.array([1.0, 1.0]) / SQ2, scale=SQ2)
    t2 = ShockTrain(amplitude=10.0, sharpness=25.0,
                    direction=np.array([1.0, -1.0]) / SQ2, scale=SQ2)
    return ProductTrains(t1, t2)


def example3():
    t1 = ShockTrain(amplitude=50.0, sharpness=50.0,
                    direction=np.array([-1.0, 1.0]) / SQ2, scale=SQ2)
    t2 = ShockTrain(amplitude=10.0, sharpness=25.0,
                    direction=np.array([1.0, 2.0]) / SQ5, scale=SQ5)
    return ProductTrains(t1, t2)


def example4():
    return LevelSet(amplitude=50.0, sharpness=50.0,
                    curve_amplitude=0.2, curve_offset=0.5)


PRESETS = {
    "example1": example1,
    "example2": example2,
    "example3": example3,
    "example4": example4,
}


def get_preset(name):
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError("unknown preset %r (have: %s)"
                       % (name, ", ".join(sorted(PRESETS))))
