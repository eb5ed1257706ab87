"""Smoke test for the ssa_lab extension module.

Build and install first:  pip install --no-build-isolation ./crates/python
"""

import math

import ssa_lab


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b}"


def main():
    h = 1 / math.sqrt(2)
    bell = ssa_lab.PureState([h, 0, 0, h], [2, 2])
    rho = bell.density()
    assert rho.dims == [2, 2]
    close(bell.reduced([0]).entropy(), 1.0, 1e-12)
    close(ssa_lab.concurrence(rho), 1.0, 1e-9)
    close(ssa_lab.eof(rho)["value"], 1.0, 1e-9)
    close(ssa_lab.discord(rho, restarts=4, seed=1)["discord"], 1.0, 1e-6)

    ghz = ssa_lab.PureState([h, 0, 0, 0, 0, 0, 0, h], [2, 2, 2])
    close(ssa_lab.t_gap(ghz.density())["t_a"], 0.0, 1e-12)
    close(ssa_lab.kw_gap(ghz.density(), restarts=4)["gap"], 0.0, 1e-4)

    state = ssa_lab.example3_state()
    closed = ssa_lab.example3_t_closed_form()
    close(ssa_lab.t_gap(state)["t_a"], closed, 1e-8)
    cert = ssa_lab.certify(state, ssa_lab.example3_spec())
    assert not cert["passed"] and cert["reconstruction"]["passed"]

    spec = ssa_lab.example3_spec(lambda1=0.0)
    built = spec.build()
    assert ssa_lab.certify(built, spec)["passed"]
    psi, d_e = spec.purify()
    assert psi.dims == [2, 4, 4, d_e]

    again = ssa_lab.DensityMatrix.from_json(state.to_json())
    close(max(abs(x - y) for r, s in zip(again.matrix(), state.matrix()) for x, y in zip(r, s)), 0.0, 1e-15)

    ab, ac = ssa_lab.extend(ssa_lab.DensityMatrix.random([2, 2, 2], 2, 5))
    assert ab.dims == [2, 4] and ac.dims == [2, 4]

    csv = ssa_lab.figure_sweep("a", 4)
    assert csv.splitlines()[0] == "param1,param2,t_closed,t_numeric"

    try:
        ssa_lab.kw_gap(ssa_lab.DensityMatrix.maximally_mixed([3, 2, 2]))
    except ssa_lab.CapabilityError:
        pass
    else:
        raise AssertionError("expected CapabilityError")
    try:
        ssa_lab.DensityMatrix([[1.5, 0], [0, -0.5]], [2])
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")

    print("smoke test ok")


if __name__ == "__main__":
    main()
