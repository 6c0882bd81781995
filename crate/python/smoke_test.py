"""Quick end-to-end check of the Python bindings.

Build and install first:

    pip install maturin
    pip install --no-build-isolation -e crates/py
"""

import math

import flowfem


def check_1d():
    field = flowfem.AppliedField(8.0, 12.0, 1.0, 20.0)
    mesh = flowfem.Mesh1D.covering(20.0, 0.25)
    params = flowfem.PhysicalParams.with_peclet(4e-7 * math.pi, 7.21e6, 3.0, 0.25)
    sol = flowfem.solve_1d(mesh, params, field, "asy")
    assert len(sol) == mesh.n_nodes == 81
    assert sol.a_y[0] == 0.0

    oracle = flowfem.discrete_oracle(mesh, params, field, "asy")
    scale = max(abs(v) for v in oracle)
    gap = max(abs(a - b) for a, b in zip(sol.a_y, oracle)) / scale
    assert gap < 1e-9, gap

    ref = flowfem.continuum_reference(mesh, field, params)
    m = flowfem.oscillation_metrics(sol, ref, mesh, field)
    assert abs(m["oscillation_amplitude"] - 0.125) < 0.02, m
    assert abs(flowfem.oscillation_amplitude_asy(3.0, 1.0)) == 0.125
    print(f"1d: oracle gap {gap:.2e}, amplitude {m['oscillation_amplitude']:.6f}")


def check_poles():
    pe = 3.0
    bx = flowfem.transfer_function(pe, 0.25, "bx")
    assert [p.real for p in bx.poles] == [1.0, -2.0]
    asy = flowfem.transfer_function(pe, 0.25, "asy")
    assert [z.real for z in asy.zeros] == [1.0, -1.0]
    cls, residual, pole = flowfem.stability_report(asy, pe)
    assert abs(residual - 2.0 / (pe - 1.0)) < 1e-12
    print(f"poles: Pe={pe} {cls}, residual {residual}, pole {pole}")
    try:
        flowfem.transfer_function(1.0, 0.25)
    except ValueError as e:
        print(f"poles: Pe=1 rejected ({e})")
    else:
        raise AssertionError("Pe = 1 should be rejected")


def check_2d():
    ch = flowfem.solve_channel(0.1)
    net, absolute = ch.net_current(0.5 * ch.z[-1])
    assert abs(net) < 1e-6 * absolute
    assert ch.residual_history()[-1] < 1e-8
    assert len(ch.values()) == len(ch.z)
    print(f"2d: {len(ch.z)} x {len(ch.y)} nodes, decay {ch.downstream_decay_metric():.4f}")


if __name__ == "__main__":
    check_1d()
    check_poles()
    check_2d()
    print("ok")
