//! Time evolution under a [`Hamiltonian2`]: the closed-form propagator, an
//! independent Runge–Kutta oracle, and the closed-form amplitude and
//! probability laws of the tuned search.

use num_complex::Complex64;

use crate::error::{Result, SearchError};
use crate::hamiltonian::Hamiltonian2;
use crate::qmodel::{InitialState, QubitState, SpectralParams};
use crate::rk4::{uniform_steps, Rk4, STEP_LIMIT};
use crate::DEGENERACY_TOL;

/// Constant C in the oracle error bound
/// `|ψ_rk4 − ψ_exact| ≤ max(1e-8, C · E_o⁵ · dt⁴ · t)` (componentwise).
/// The leading local phase error of RK4 on a rotation of frequency E_o is
/// (E_o dt)⁵ / 120.
pub const RK4_ERROR_CONSTANT: f64 = 0.01;

/// e^{−iHt} ψ₀ through the spectral decomposition
/// e^{−iE₁t}|E₁⟩⟨E₁| + e^{−iE₂t}|E₂⟩⟨E₂|, with eigenvectors built from the
/// mixing angle and phase read off H.
pub fn propagate_exact(h: &Hamiltonian2, psi0: &QubitState, t: f64) -> QubitState {
    if t == 0.0 {
        return *psi0;
    }
    let e_p = h.mean_energy();
    let e_o = h.half_gap();
    let psi = psi0.amplitudes();
    if e_o == 0.0 {
        let phase = Complex64::from_polar(1.0, -e_p * t);
        return QubitState::from_amplitudes(phase * psi[0], phase * psi[1]);
    }

    // H = E_p + E_o [[cos 2x, sin 2x e^{iα}], [sin 2x e^{−iα}, −cos 2x]]
    let two_x = (h.h_wp().norm()).atan2(0.5 * (h.h_ww() - h.h_pp()));
    let (sx, cx) = (0.5 * two_x).sin_cos();
    let ea = if h.h_wp().norm() > 0.0 {
        h.h_wp() / h.h_wp().norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let e1 = [ea * cx, Complex64::new(sx, 0.0)];
    let e2 = [Complex64::new(-sx, 0.0), ea.conj() * cx];

    let c1 = e1[0].conj() * psi[0] + e1[1].conj() * psi[1];
    let c2 = e2[0].conj() * psi[0] + e2[1].conj() * psi[1];
    let p1 = c1 * Complex64::from_polar(1.0, -(e_p + e_o) * t);
    let p2 = c2 * Complex64::from_polar(1.0, -(e_p - e_o) * t);
    QubitState::from_amplitudes(p1 * e1[0] + p2 * e2[0], p1 * e1[1] + p2 * e2[1])
}

/// Output of the Runge–Kutta oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPropagation {
    pub state: QubitState,
    /// ‖ψ(t)‖ − 1. The state is not renormalized.
    pub norm_drift: f64,
    pub steps: usize,
}

/// e^{−iHt} ψ₀ by fixed-step RK4.
///
/// The trace part E_p·1 commutes with everything and only contributes the
/// global phase e^{−iE_p t}, which is applied analytically; RK4 integrates
/// H − E_p. The step is `t / ceil(t / dt)` and must satisfy dt·E_o ≤ 0.05.
pub fn propagate_numeric(
    h: &Hamiltonian2,
    psi0: &QubitState,
    t: f64,
    dt: f64,
) -> Result<NumericPropagation> {
    check_step(h, dt)?;
    if t == 0.0 {
        return Ok(NumericPropagation {
            state: *psi0,
            norm_drift: psi0.norm() - 1.0,
            steps: 0,
        });
    }
    let mut psi = psi0.amplitudes();
    let steps = integrate_traceless(h, &mut psi, t, dt);
    let phase = Complex64::from_polar(1.0, -h.mean_energy() * t);
    let state = QubitState::from_amplitudes(phase * psi[0], phase * psi[1]);
    Ok(NumericPropagation {
        state,
        norm_drift: state.norm() - 1.0,
        steps,
    })
}

fn check_step(h: &Hamiltonian2, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(SearchError::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "step must be positive",
        });
    }
    let product = dt * h.half_gap();
    if product > STEP_LIMIT {
        return Err(SearchError::StepTooLarge {
            dt,
            scale_name: "E_o",
            product,
            limit: STEP_LIMIT,
        });
    }
    Ok(())
}

/// Advances `psi` by `t` under H − E_p. Returns the number of steps.
fn integrate_traceless(h: &Hamiltonian2, psi: &mut [Complex64; 2], t: f64, dt: f64) -> usize {
    let e_p = h.mean_energy();
    let shifted = Hamiltonian2::new(h.h_ww() - e_p, h.h_wp(), h.h_pp() - e_p);
    let (n, step) = uniform_steps(t, dt);
    let mut rk = Rk4::new(2);
    for _ in 0..n {
        rk.step(psi, step, |x, out| {
            let y = shifted.apply([x[0], x[1]]);
            out[0] = y[0];
            out[1] = y[1];
        });
    }
    n
}

/// ⟨w⊥| e^{−iHt} |s⟩ for the spectral-form Hamiltonian with mixing angle x:
///
/// ```text
/// e^{−iE_p t} [ cos β cos(E_o t) − sin(α−u) sin 2x sin β sin(E_o t)
///             + i (cos 2x cos β − cos(α−u) sin 2x sin β) sin(E_o t) ]
/// ```
pub fn amplitude_perp(sp: &SpectralParams, x: f64, init: &InitialState, t: f64) -> Complex64 {
    let (sb, cb) = (init.sin_beta(), init.cos_beta());
    let (s2x, c2x) = (2.0 * x).sin_cos();
    let (s_rel, c_rel) = (sp.alpha() - init.u()).sin_cos();
    let (s_ot, c_ot) = (sp.e_o() * t).sin_cos();
    let re = cb * c_ot - s_rel * s2x * sb * s_ot;
    let im = (c2x * cb - c_rel * s2x * sb) * s_ot;
    Complex64::from_polar(1.0, -sp.e_p() * t) * Complex64::new(re, im)
}

/// P(t) = 1 − (cos²β / cos²γ) cos²(E_o t + γ).
pub fn probability_closed(init: &InitialState, gamma: f64, e_o: f64, t: f64) -> Result<f64> {
    let cg = gamma.cos();
    if cg.abs() <= DEGENERACY_TOL {
        return Err(SearchError::DegenerateInitialState(
            "cos(gamma) = 0 in the probability law",
        ));
    }
    let ratio = init.cos_beta() / cg;
    Ok(1.0 - ratio * ratio * (e_o * t + gamma).cos().powi(2))
}

/// How states are produced for a sampled trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Propagator {
    Exact,
    /// RK4 with the given maximum step, integrated continuously across
    /// samples.
    Numeric {
        dt: f64,
    },
}

/// Uniform closed grid t_k = t_max · k / (n − 1), k = 0..n.
pub fn time_grid(t_max: f64, n_samples: usize) -> Vec<f64> {
    let last = (n_samples - 1) as f64;
    (0..n_samples)
        .map(|k| {
            if k + 1 == n_samples {
                t_max
            } else {
                t_max * k as f64 / last
            }
        })
        .collect()
}

fn check_grid(t_max: f64, n_samples: usize) -> Result<()> {
    if n_samples < 2 {
        return Err(SearchError::InvalidParameter {
            name: "n_samples",
            value: n_samples as f64,
            reason: "need at least two samples",
        });
    }
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(SearchError::InvalidParameter {
            name: "t_max",
            value: t_max,
            reason: "must be positive",
        });
    }
    Ok(())
}

/// States on the uniform grid over [0, t_max].
pub fn sample_states(
    h: &Hamiltonian2,
    psi0: &QubitState,
    t_max: f64,
    n_samples: usize,
    propagator: Propagator,
) -> Result<Vec<(f64, QubitState)>> {
    check_grid(t_max, n_samples)?;
    let grid = time_grid(t_max, n_samples);
    match propagator {
        Propagator::Exact => Ok(grid
            .into_iter()
            .map(|t| (t, propagate_exact(h, psi0, t)))
            .collect()),
        Propagator::Numeric { dt } => {
            check_step(h, dt)?;
            let e_p = h.mean_energy();
            let mut psi = psi0.amplitudes();
            let mut prev = 0.0;
            let mut out = Vec::with_capacity(n_samples);
            for t in grid {
                integrate_traceless(h, &mut psi, t - prev, dt);
                prev = t;
                let phase = Complex64::from_polar(1.0, -e_p * t);
                out.push((
                    t,
                    QubitState::from_amplitudes(phase * psi[0], phase * psi[1]),
                ));
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub p_w: f64,
}

/// Marked-state probability sampled in time.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTrace {
    pub samples: Vec<TraceSample>,
    /// Spacing of the sampling grid.
    pub step: f64,
    /// Free-form description of the parameter set.
    pub label: String,
}

impl ProbabilityTrace {
    pub fn new(samples: Vec<TraceSample>, step: f64, label: impl Into<String>) -> Self {
        Self {
            samples,
            step,
            label: label.into(),
        }
    }

    /// The sample of largest p_w; the earliest one on ties.
    pub fn peak(&self) -> Option<TraceSample> {
        self.samples
            .iter()
            .copied()
            .fold(None, |best, s| match best {
                Some(b) if b.p_w >= s.p_w => Some(b),
                _ => Some(s),
            })
    }

    /// First local maximum after t = 0, skipping a flat or rising start.
    pub fn first_peak(&self) -> Option<TraceSample> {
        let s = &self.samples;
        (1..s.len().saturating_sub(1))
            .find(|&k| s[k].p_w >= s[k - 1].p_w && s[k].p_w > s[k + 1].p_w)
            .map(|k| s[k])
    }
}

/// |⟨w|Ψ(t)⟩|² on the uniform grid over [0, t_max], from the exact propagator.
pub fn trace(
    h: &Hamiltonian2,
    psi0: &QubitState,
    t_max: f64,
    n_samples: usize,
) -> Result<ProbabilityTrace> {
    let samples = sample_states(h, psi0, t_max, n_samples, Propagator::Exact)?
        .into_iter()
        .map(|(t, psi)| TraceSample {
            t,
            p_w: psi.marked_probability(),
        })
        .collect();
    Ok(ProbabilityTrace::new(
        samples,
        t_max / (n_samples - 1) as f64,
        format!("{h:?}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmodel::{to_spectral, CouplingParams};
    use crate::timing::{first_time_from_coupling, measuring_times, solve_mixing_angle};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_x() -> Hamiltonian2 {
        Hamiltonian2::new(0.0, c(1.0, 0.0), 0.0)
    }

    fn perp() -> QubitState {
        QubitState::unmarked()
    }

    #[test]
    fn exact_identity_hamiltonian() {
        let h = Hamiltonian2::new(1.0, c(0.0, 0.0), 1.0);
        let psi = InitialState::new(0.4, 1.1).unwrap().state();
        let out = propagate_exact(&h, &psi, TAU);
        assert!((out.a_w() - psi.a_w()).norm() < 1e-14);
        assert!((out.a_perp() - psi.a_perp()).norm() < 1e-14);
    }

    #[test]
    fn exact_full_transfer() {
        // e^{-iσ_x π/2} = −iσ_x
        let out = propagate_exact(&pauli_x(), &perp(), FRAC_PI_2);
        assert!((out.a_w() - c(0.0, -1.0)).norm() < 1e-15);
        assert!(out.a_perp().norm() < 1e-15);
    }

    #[test]
    fn exact_tuned_reaches_marked_state() {
        let init = InitialState::new(FRAC_PI_6, 0.0).unwrap();
        let h =
            Hamiltonian2::from_spectral_tuned(&SpectralParams::new(1.0, 1.0, 0.0).unwrap(), &init)
                .unwrap();
        let out = propagate_exact(&h, &init.state(), FRAC_PI_2);
        assert!(out.same_ray(&QubitState::marked(), 1e-14));
    }

    #[test]
    fn exact_time_zero_is_identity() {
        let psi = InitialState::new(0.3, 0.2).unwrap().state();
        assert_eq!(propagate_exact(&pauli_x(), &psi, 0.0), psi);
    }

    #[test]
    fn numeric_examples() {
        let psi = InitialState::new(0.3, 0.2).unwrap().state();
        let r = propagate_numeric(&pauli_x(), &psi, 0.0, 1e-3).unwrap();
        assert_eq!(r.state, psi);

        let r = propagate_numeric(&pauli_x(), &perp(), FRAC_PI_2, 1e-3).unwrap();
        assert!((r.state.a_w() - c(0.0, -1.0)).norm() < 1e-9);
        assert!(r.state.a_perp().norm() < 1e-9);
        assert!(r.norm_drift.abs() < 1e-12);

        let init = InitialState::new(FRAC_PI_6, 0.0).unwrap();
        let cp = CouplingParams::new(0.0, 1.0, FRAC_PI_2).unwrap();
        let h = Hamiltonian2::from_coupling(&cp, &init);
        let t1 = first_time_from_coupling(&cp, &init).unwrap();
        let r = propagate_numeric(&h, &init.state(), t1, 1e-3).unwrap();
        assert!(r.state.marked_probability() >= 1.0 - 1e-8);
    }

    #[test]
    fn numeric_step_guard() {
        let h = Hamiltonian2::new(0.0, c(2.0, 0.0), 0.0);
        assert!(matches!(
            propagate_numeric(&h, &perp(), 1.0, 0.03),
            Err(SearchError::StepTooLarge { .. })
        ));
        assert!(propagate_numeric(&h, &perp(), 1.0, -1.0).is_err());
        // a large trace does not count against the guard
        let h = Hamiltonian2::new(100.0, c(1.0, 0.0), 100.0);
        assert!(propagate_numeric(&h, &perp(), 1.0, 0.05).is_ok());
    }

    #[test]
    fn amplitude_examples() {
        let sp = SpectralParams::new(0.7, 1.3, 0.4).unwrap();
        let init = InitialState::new(0.5, -0.2).unwrap();
        assert!((amplitude_perp(&sp, 0.3, &init, 0.0) - c(0.5f64.cos(), 0.0)).norm() < 1e-15);

        let g = solve_mixing_angle(&init, sp.alpha()).unwrap();
        let t1 = measuring_times(&g, sp.e_o()).unwrap().t_first();
        assert!(amplitude_perp(&sp, g.x(), &init, t1).norm() < 1e-12);

        let sp = SpectralParams::new(0.0, 1.0, 0.0).unwrap();
        let init = InitialState::new(0.0, 0.0).unwrap();
        for t in [0.3, 1.0, 2.5] {
            let a = amplitude_perp(&sp, 0.0, &init, t);
            assert!((a - c(t.cos(), t.sin())).norm() < 1e-15);
        }
    }

    #[test]
    fn probability_examples() {
        let init = InitialState::new(FRAC_PI_6, 0.0).unwrap();
        let p0 = probability_closed(&init, 0.0, 1.0, 0.0).unwrap();
        assert!((p0 - 0.25).abs() < 1e-15);
        assert!((probability_closed(&init, 0.0, 1.0, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert!((probability_closed(&init, 0.0, 1.0, PI).unwrap() - 0.25).abs() < 1e-15);
        assert!(probability_closed(&init, FRAC_PI_2, 1.0, 0.0).is_err());
    }

    #[test]
    fn trace_examples() {
        let tr = trace(&pauli_x(), &QubitState::marked(), 1.0, 5).unwrap();
        assert_eq!(tr.samples[0].p_w, 1.0);
        assert_eq!(tr.samples[0].t, 0.0);
        assert_eq!(tr.samples[4].t, 1.0);

        let init = InitialState::new(FRAC_PI_6, 0.0).unwrap();
        let h =
            Hamiltonian2::from_spectral_tuned(&SpectralParams::new(1.0, 1.0, 0.0).unwrap(), &init)
                .unwrap();
        let tr = trace(&h, &init.state(), TAU, 9).unwrap();
        assert!((tr.samples[2].t - FRAC_PI_2).abs() < 1e-15);
        assert!((tr.samples[2].p_w - 1.0).abs() < 1e-14);
        assert!((tr.samples[0].p_w - 0.25).abs() < 1e-15);
        // period π/E_o = π: samples k and k + 4 coincide
        for k in 0..5 {
            assert!((tr.samples[k].p_w - tr.samples[k + 4].p_w).abs() < 1e-13);
        }
        assert!(trace(&h, &init.state(), TAU, 1).is_err());
        assert!(trace(&h, &init.state(), 0.0, 5).is_err());
    }

    #[test]
    fn trace_peaks() {
        let tr = ProbabilityTrace::new(
            [0.2, 0.5, 0.9, 0.4, 0.95, 0.1]
                .iter()
                .enumerate()
                .map(|(k, &p)| TraceSample {
                    t: k as f64,
                    p_w: p,
                })
                .collect(),
            1.0,
            "toy",
        );
        assert_eq!(tr.first_peak().unwrap().t, 2.0);
        assert_eq!(tr.peak().unwrap().t, 4.0);
    }

    #[test]
    fn numeric_grid_agrees_with_exact() {
        let init = InitialState::new(0.7, 0.9).unwrap();
        let cp = CouplingParams::new(1.2, 0.8, -2.0).unwrap();
        let h = Hamiltonian2::from_coupling(&cp, &init);
        let a = sample_states(&h, &init.state(), 5.0, 11, Propagator::Exact).unwrap();
        let b =
            sample_states(&h, &init.state(), 5.0, 11, Propagator::Numeric { dt: 1e-3 }).unwrap();
        for ((ta, sa), (tb, sb)) in a.iter().zip(&b) {
            assert_eq!(ta, tb);
            assert!((sa.a_w() - sb.a_w()).norm() < 1e-8);
            assert!((sa.a_perp() - sb.a_perp()).norm() < 1e-8);
        }
    }

    fn hermitian() -> impl Strategy<Value = Hamiltonian2> {
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
            .prop_map(|(a, re, im, d)| Hamiltonian2::new(a, c(re, im), d))
    }

    fn unit_state() -> impl Strategy<Value = QubitState> {
        (0.0..FRAC_PI_2, -PI..PI, -PI..PI).prop_map(|(b, u, g)| {
            let s = InitialState::new(b, u).unwrap().state();
            let ph = Complex64::from_polar(1.0, g);
            QubitState::new(ph * s.a_w(), ph * s.a_perp()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn norm_conserved(h in hermitian(), psi in unit_state(), f in 0.0..1.0f64) {
            let e_o = h.half_gap();
            prop_assume!(e_o > 1e-3);
            let out = propagate_exact(&h, &psi, f * 100.0 / e_o);
            prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn composition(h in hermitian(), psi in unit_state(), t1 in 0.0..10.0f64, t2 in 0.0..10.0f64) {
            let a = propagate_exact(&h, &psi, t1 + t2);
            let b = propagate_exact(&h, &propagate_exact(&h, &psi, t1), t2);
            prop_assert!((a.a_w() - b.a_w()).norm() < 1e-11);
            prop_assert!((a.a_perp() - b.a_perp()).norm() < 1e-11);
        }

        #[test]
        fn exact_solves_schrodinger(h in hermitian(), psi in unit_state(), t in 0.1..5.0f64) {
            // central difference of ψ(t) against −iHψ(t)
            let eps = 1e-5;
            let p = propagate_exact(&h, &psi, t + eps).amplitudes();
            let m = propagate_exact(&h, &psi, t - eps).amplitudes();
            let hpsi = h.apply(propagate_exact(&h, &psi, t).amplitudes());
            for i in 0..2 {
                let deriv = (p[i] - m[i]) / (2.0 * eps);
                prop_assert!((deriv - c(0.0, -1.0) * hpsi[i]).norm() < 1e-7);
            }
        }

        #[test]
        fn rk4_within_bound(h in hermitian(), psi in unit_state(), t in 0.0..20.0f64, k in 1.0..50.0f64) {
            let e_o = h.half_gap();
            prop_assume!(e_o > 1e-2);
            let dt = STEP_LIMIT / e_o / k;
            let exact = propagate_exact(&h, &psi, t);
            let num = propagate_numeric(&h, &psi, t, dt).unwrap();
            let bound = (RK4_ERROR_CONSTANT * e_o.powi(5) * dt.powi(4) * t).max(1e-8);
            prop_assert!((exact.a_w() - num.state.a_w()).norm() <= bound);
            prop_assert!((exact.a_perp() - num.state.a_perp()).norm() <= bound);
        }

        #[test]
        fn amplitude_matches_propagator(
            e_p in -3.0..3.0f64, e_o in 0.0..3.0f64, alpha in -PI..PI, x in 0.0..FRAC_PI_2,
            beta in 0.0..FRAC_PI_2, u in -PI..PI, t in 0.0..20.0f64
        ) {
            let sp = SpectralParams::new(e_p, e_o, alpha).unwrap();
            let init = InitialState::new(beta, u).unwrap();
            let h = Hamiltonian2::from_spectral_angle(&sp, x);
            let psi = propagate_exact(&h, &init.state(), t);
            let a = amplitude_perp(&sp, x, &init, t);
            prop_assert!((psi.a_perp() - a).norm() < 1e-12);
            prop_assert!((a.norm_sqr() + psi.marked_probability() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn probability_law_matches_amplitude(
            e_o in 0.05..3.0f64, alpha in -PI..PI, beta in 0.0..1.55f64, u in -PI..PI, t in 0.0..20.0f64
        ) {
            let sp = SpectralParams::new(0.3, e_o, alpha).unwrap();
            let init = InitialState::new(beta, u).unwrap();
            let g = solve_mixing_angle(&init, alpha).unwrap();
            let p = probability_closed(&init, g.gamma(), e_o, t).unwrap();
            let a = amplitude_perp(&sp, g.x(), &init, t);
            prop_assert!((p - (1.0 - a.norm_sqr())).abs() < 1e-12);
            prop_assert!(p >= g.probability_floor() - 1e-12 && p <= 1.0 + 1e-12);
            let later = probability_closed(&init, g.gamma(), e_o, t + PI / e_o).unwrap();
            prop_assert!((p - later).abs() < 1e-12);
        }

        #[test]
        fn coupling_dynamics_certainty(
            e_fg in 0.0..3.0f64, e_f in 0.0..3.0f64, phi in -PI..PI, beta in 0.05..1.5f64, u in -PI..PI
        ) {
            let cp = CouplingParams::new(e_fg, e_f, phi).unwrap();
            let init = InitialState::new(beta, u).unwrap();
            prop_assume!(to_spectral(&cp, &init).spectral.e_o() > 1e-3);
            let t1 = first_time_from_coupling(&cp, &init).unwrap();
            let h = Hamiltonian2::from_coupling(&cp, &init);
            let p = propagate_exact(&h, &init.state(), t1).marked_probability();
            prop_assert!((p - 1.0).abs() < 1e-9);
        }
    }
}
