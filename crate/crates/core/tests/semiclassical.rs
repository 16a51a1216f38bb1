use std::sync::OnceLock;

use bound_tunnel::semiclassical::{
    continuation_sweep, discretize_contour, extrapolate_f0, f0_from, residual, solve_bvp, sphaleron_seed, AsymptoticCoeffs, BvpSolution,
    ContinuationOptions, ContourSpec, F0Options, Segment, SolverOptions, SweepParam,
};
use bound_tunnel::{Error, ModelParams};

const NU0: f64 = 0.910601;

fn params() -> ModelParams {
    ModelParams::default()
}

fn seed() -> &'static BvpSolution {
    static SEED: OnceLock<BvpSolution> = OnceLock::new();
    SEED.get_or_init(|| sphaleron_seed(&params(), &ContourSpec::default(), &SolverOptions::default()).unwrap())
}

/// Continue from `from` in `param` to `target`, handing over the tracked contour.
fn walk(from: &BvpSolution, param: SweepParam, target: f64, opts: &ContinuationOptions) -> BvpSolution {
    let b = continuation_sweep(&params(), from, param, target, opts);
    let mut s = b.last().unwrap().clone();
    s.contour = b.next_contour;
    assert!(b.end.is_none(), "sweep in {param:?} to {target} stopped: {:?}", b.end);
    s
}

/// Solution at ε = 0.51, θ = 2, re-solved tightly.
fn interior() -> &'static BvpSolution {
    static AT: OnceLock<BvpSolution> = OnceLock::new();
    AT.get_or_init(|| {
        let o = ContinuationOptions::default();
        let s = walk(seed(), SweepParam::Epsilon, 0.51, &o);
        let s = walk(&s, SweepParam::Theta, 2.0, &o);
        solve_bvp(&params(), &s.contour, 2.0, &s.unknowns, &tight()).unwrap()
    })
}

fn tight() -> SolverOptions {
    SolverOptions { tol: 1e-12, ..SolverOptions::default() }
}

#[test]
fn contour_nodes_follow_b_c_de() {
    let spec = ContourSpec { t_total: 4.0, t_left: -10.0, t_right: 12.0, t_c: 1.5, spacing: 0.1 };
    let nodes = discretize_contour(&spec);
    let (nb, nc, nd) = spec.node_counts();
    assert_eq!(nodes.len(), nb + nc + nd);
    assert_eq!((nb, nc, nd), (116, 20, 105));
    let first_c = nodes.iter().position(|n| n.segment == Segment::C).unwrap();
    let first_de = nodes.iter().position(|n| n.segment == Segment::DE).unwrap();
    assert_eq!((first_c, first_de), (nb, nb + nc));
    assert_eq!(nodes[0].t.re, -10.0);
    assert_eq!(nodes[nb - 1].t, spec.corner());
    assert_eq!(nodes[first_de - 1].t.im, 0.0);
    assert_eq!(nodes.last().unwrap().t.re, 12.0);
    assert!(nodes[..nb].iter().all(|n| n.t.im == 2.0));
    assert!(nodes[nb..first_de].iter().all(|n| n.t.re == 1.5));
    for w in nodes.windows(2) {
        assert!((w[1].t - w[0].t).norm() <= spec.spacing + 1e-12);
    }
}

#[test]
fn contour_validation_rejects_bad_specs() {
    let ok = ContourSpec::default();
    assert!(ok.validate(0.5).is_ok());
    assert!(ContourSpec { t_c: 50.0, ..ok }.validate(0.5).is_err());
    assert!(ContourSpec { t_total: -1.0, ..ok }.validate(0.5).is_err());
    assert!(ContourSpec { spacing: 0.5, ..ok }.validate(0.5).is_err());
}

#[test]
fn seed_sits_at_the_sphaleron_corner() {
    // F → 0 as (ε, ν) → (1, ν₀)
    let s = seed();
    let r = s.record();
    assert!(s.transmitted);
    assert!(r.residual_norm < 1e-8);
    assert!((r.epsilon - 1.0).abs() < 0.01, "ε = {}", r.epsilon);
    assert!((r.nu - NU0).abs() < 0.01, "ν = {}", r.nu);
    assert!(r.f.abs() < 0.02, "F = {}", r.f);
    assert_eq!(r.theta, 0.0);
}

#[test]
fn residual_vanishes_on_a_solution() {
    let s = interior();
    let r = residual(&s.coeffs, &s.contour, s.theta, &params()).unwrap();
    assert_eq!(r.len(), 8);
    assert!(r.iter().all(|v| v.abs() < 1e-10), "{r:?}");
}

#[test]
fn trajectory_is_real_on_the_real_axis() {
    let s = interior();
    for (n, z) in s.traj.segment_states(Segment::DE) {
        let m = [z.x.im, z.y.im, z.vx.im, z.vy.im].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(m < 1e-8, "Im part {m:e} at t = {}", n.t);
    }
    assert!(s.traj.states.last().unwrap().x.re > 0.0);
}

#[test]
fn energy_is_conserved_along_the_contour() {
    let s = interior();
    let p = params();
    let e0 = s.traj.states[0].energy(p.omega, &p.barrier);
    assert!((e0.re - s.charges.epsilon).abs() < 1e-8 && e0.im.abs() < 1e-8);
    for z in &s.traj.states {
        assert!((z.energy(p.omega, &p.barrier) - e0).norm() < 1e-8);
    }
}

#[test]
fn oscillator_amplitudes_read_back_from_samples() {
    let s = interior();
    let p = params();
    let corner = 0.5 * s.contour.t_total;
    // the free region on B, well before the barrier
    let samples: Vec<(f64, _)> = s
        .traj
        .segment_states(Segment::B)
        .filter(|(n, _)| n.t.re < -25.0)
        .map(|(n, z)| {
            assert_eq!(n.t.im, corner);
            (n.t.re, z.y)
        })
        .collect();
    assert!(samples.len() > 50);
    let (u, v) = AsymptoticCoeffs::project_oscillator(&samples, p.omega);
    assert!((u - s.coeffs.u).norm() < 1e-8 && (v - s.coeffs.v).norm() < 1e-8, "{u} {v} vs {} {}", s.coeffs.u, s.coeffs.v);
    // v = u* e^θ
    assert!((s.coeffs.v - s.coeffs.u.conj() * s.theta.exp()).norm() < 1e-12);
}

#[test]
fn zero_theta_keeps_oscillator_real_on_b() {
    let s = walk(seed(), SweepParam::Epsilon, 0.7, &ContinuationOptions::default());
    assert_eq!(s.theta, 0.0);
    for (_, z) in s.traj.segment_states(Segment::B) {
        assert!(z.y.im.abs() < 1e-8);
    }
}

#[test]
fn legendre_derivatives_give_energy_and_excitation() {
    let s = interior();
    let p = params();
    let two_im = |c: ContourSpec, th: f64| solve_bvp(&p, &c, th, &s.unknowns, &tight()).unwrap().record().two_im_s0;
    let h = 1e-3;
    let c = s.contour;
    let dt = (two_im(ContourSpec { t_total: c.t_total + h, ..c }, s.theta) - two_im(ContourSpec { t_total: c.t_total - h, ..c }, s.theta)) / (2.0 * h);
    let dth = (two_im(c, s.theta + h) - two_im(c, s.theta - h)) / (2.0 * h);
    assert!((dt / s.charges.epsilon - 1.0).abs() < 1e-6, "∂/∂T = {dt}, ε = {}", s.charges.epsilon);
    assert!((dth / s.charges.nu - 1.0).abs() < 1e-6, "∂/∂θ = {dth}, ν = {}", s.charges.nu);
}

#[test]
fn exponent_is_independent_of_vertical_leg_position() {
    let p = params();
    let s = interior();
    // away from θ = 0 the leg can only move left, or right by less than the
    // distance to the nearest complex singularity
    for d in [-1.0, -0.5, 0.25, 0.5] {
        let c = ContourSpec { t_c: s.contour.t_c + d, ..s.contour };
        let x = solve_bvp(&p, &c, s.theta, &s.unknowns, &tight()).unwrap();
        assert!((x.f() - s.f()).abs() < 1e-8, "shift {d}: ΔF = {:e}", x.f() - s.f());
    }
    let z = walk(seed(), SweepParam::Epsilon, 0.7, &ContinuationOptions::default());
    let z = solve_bvp(&p, &z.contour, 0.0, &z.unknowns, &tight()).unwrap();
    for d in [-1.0, 1.0] {
        let c = ContourSpec { t_c: z.contour.t_c + d, ..z.contour };
        let x = solve_bvp(&p, &c, 0.0, &z.unknowns, &tight()).unwrap();
        assert!((x.f() - z.f()).abs() < 1e-8, "θ = 0 shift {d}: ΔF = {:e}", x.f() - z.f());
    }
}

#[test]
fn halving_the_step_reaches_the_same_solution() {
    let coarse = ContinuationOptions::default();
    let fine = ContinuationOptions { step: 0.5 * coarse.step, max_step: 0.5 * coarse.max_step, ..coarse };
    let end = |o: &ContinuationOptions| {
        let s = walk(seed(), SweepParam::Epsilon, 0.6, o);
        walk(&s, SweepParam::Theta, 1.5, o).f()
    };
    let (a, b) = (end(&coarse), end(&fine));
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn energy_falls_monotonically_as_period_grows() {
    let b = continuation_sweep(&params(), seed(), SweepParam::T, 6.0, &ContinuationOptions::default());
    assert!(b.end.is_none(), "{:?}", b.end);
    let eps: Vec<f64> = b.points.iter().map(|s| s.charges.epsilon).collect();
    assert!(eps.len() > 3);
    assert!(eps.windows(2).all(|w| w[1] < w[0]), "{eps:?}");
    assert!(b.points.iter().all(|s| s.transmitted && s.f() > 0.0));
}

#[test]
fn extrapolation_recovers_synthetic_quadratic() {
    let nu = [0.4, 0.3, 0.2, 0.12, 0.07, 0.03];
    let f: Vec<f64> = nu.iter().map(|n| 3.0 - 2.0 * n + 0.7 * n * n).collect();
    let x = extrapolate_f0(0.5, &nu, &f, 1e-9).unwrap();
    assert!((x.quadratic - 3.0).abs() < 1e-10);
    assert_eq!(x.f0, x.quadratic);
    assert_eq!(x.points, 6);
    assert_eq!(x.nu_min, 0.03);
    // a pure line is recovered by both fits
    let f: Vec<f64> = nu.iter().map(|n| 3.0 - 2.0 * n).collect();
    let x = extrapolate_f0(0.5, &nu, &f, 1e-9).unwrap();
    assert!((x.linear - 3.0).abs() < 1e-10 && x.relative_spread() < 1e-10);
}

#[test]
fn extrapolation_rejects_bad_sequences() {
    let nu = [0.4, 0.3, 0.2];
    assert!(matches!(extrapolate_f0(0.5, &nu, &[1.0, 1.1, 1.2], 1e-9), Err(Error::InsufficientPoints { .. })));
    let nu = [0.4, 0.3, 0.35, 0.1];
    assert!(matches!(extrapolate_f0(0.5, &nu, &[1.0, 1.1, 1.2, 1.3], 1e-9), Err(Error::Extrapolation(_))));
}

#[test]
fn f0_at_half_barrier_energy_is_stable() {
    let o = F0Options::default();
    let s = walk(seed(), SweepParam::Epsilon, 0.51, &o.continuation);
    let r = f0_from(&params(), &s, &o).unwrap();
    assert!((r.epsilon - 0.51).abs() < 1e-9);
    assert!((r.extrapolation.f0 - 3.178965).abs() < 1e-4, "F₀ = {}", r.extrapolation.f0);
    assert!(r.extrapolation.relative_spread() < 1e-3);
    assert!(r.extrapolation.f0 > r.tail.iter().map(|t| t.f).fold(0.0, f64::max));
}
