"""Smoke test for the bound_tunnel extension module.

Build and run:
    cargo build --release -p bound-tunnel-py --features extension-module
    cp target/release/libbound_tunnel_py.so python/bound_tunnel.so
    python3 python/smoke_test.py
(or `maturin develop -m crates/python/Cargo.toml`).
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import bound_tunnel as bt


def check(name, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'}  {name} {detail}")
    return ok


def main():
    p = bt.ModelParams()
    results = []

    nu0 = bt.find_nu0(p)
    results.append(check("nu0 in [0.85, 0.95]", 0.85 <= nu0 <= 0.95, f"({nu0:.5f})"))

    eps_crit = bt.find_epsilon_crit(p)
    results.append(check("epsilon_crit in [1.75, 1.85]", 1.75 <= eps_crit <= 1.85, f"({eps_crit:.5f})"))

    v = bt.potential_matrix(bt.ModelParams(g=0.3), 0.7, 20)
    asym = max(abs(v[i][j] - v[j][i]) for i in range(21) for j in range(21))
    results.append(check("potential matrix symmetric", asym < 1e-12, f"({asym:.1e})"))

    free = bt.solve_scattering(bt.ModelParams(barrier="free"), 3.0, 12, 0.1, 50)
    results.append(check("free propagation T0 = 1", abs(free.t_total - 1.0) < 1e-10, f"({free.t_total:.12f})"))

    inv_g2 = [6.0, 8.0, 10.0, 12.0]
    ln_t = bt.scan_g(p, 0.55, inv_g2)
    fit = bt.fit_exponent(0.55, inv_g2, ln_t)
    results.append(check("quantum fit R^2 >= 0.999", fit.r2 >= 0.999, f"(F0 = {fit.f0:.4f}, R^2 = {fit.r2:.7f})"))

    (sc,) = bt.semiclassical_f0(p, [0.55])
    rel = abs(sc.f0 - fit.f0) / fit.f0
    results.append(check("semiclassical vs quantum within 5%", rel < 0.05, f"(F0 = {sc.f0:.4f}, rel {rel:.1e})"))

    synth = bt.fit_exponent(0.5, [1.0, 2.0, 3.0, 4.0], [math.log(0.7) - 1.3 * x for x in [1.0, 2.0, 3.0, 4.0]])
    results.append(check("synthetic slope recovered", abs(synth.f0 - 1.3) < 1e-12))

    try:
        bt.ModelParams(omega=-1.0)
        results.append(check("invalid omega rejected", False))
    except ValueError:
        results.append(check("invalid omega rejected", True))

    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
