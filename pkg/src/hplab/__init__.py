"""Numerical laboratory for Hermite-Pade polynomials of algebraic germs,
extremal (maximal Robin constant) compact sets on the surface w^2 = z^2 - 1,
and the induced four-sheet ordering.

Pipeline, roughly bottom-up:

* :mod:`hplab.funcspec`   -- function-class parameter validation, branch data
* :mod:`hplab.series`     -- arbitrary-precision Laurent germs at infinity
* :mod:`hplab.hermite_pade` -- type-I Hermite-Pade systems and polynomial zeros
* :mod:`hplab.surface`    -- uniformization of w^2 = z^2 - 1
* :mod:`hplab.scurve`     -- Chebotarev polynomial and trajectory tracing
* :mod:`hplab.green`      -- Green functions, Robin constants, S-property
* :mod:`hplab.nuttall`    -- sheet functions u1..u4 and ordering reports
* :mod:`hplab.equilibrium` -- nonstandard energy problem on discretized arcs
* :mod:`hplab.cli`        -- batch front end
"""

__version__ = "0.1.0"
