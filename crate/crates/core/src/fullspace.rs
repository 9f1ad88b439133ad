//! Brute-force oracle on the full N-item space.
//!
//! |w⟩ is the normalized uniform superposition over the marked items and
//! |s⟩ the uniform superposition over all items with phase e^{iu} on its
//! marked part. The search Hamiltonian is assembled densely from outer
//! products and integrated with RK4, independently of the two-level
//! reduction it is meant to check.

use num_complex::Complex64;

use crate::error::{Result, SearchError};
use crate::evolution::{ProbabilityTrace, TraceSample};
use crate::hamiltonian::Hamiltonian2;
use crate::qmodel::{CouplingParams, InitialState};
use crate::rk4::{uniform_steps, Rk4, STEP_LIMIT};

/// Largest N the dense oracle accepts.
pub const MAX_ITEMS: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchInstance {
    n_items: usize,
    marked: Vec<usize>,
    is_marked: Vec<bool>,
    u: f64,
}

impl SearchInstance {
    pub fn new(n_items: usize, marked: impl IntoIterator<Item = usize>, u: f64) -> Result<Self> {
        if n_items < 2 {
            return Err(SearchError::InvalidInstance(format!("N = {n_items} < 2")));
        }
        let mut is_marked = vec![false; n_items];
        for i in marked {
            if i >= n_items {
                return Err(SearchError::InvalidInstance(format!(
                    "marked index {i} out of range for N = {n_items}"
                )));
            }
            is_marked[i] = true;
        }
        let marked: Vec<usize> = (0..n_items).filter(|&i| is_marked[i]).collect();
        if marked.is_empty() || marked.len() == n_items {
            return Err(SearchError::InvalidInstance(format!(
                "need 1 <= M < N, got M = {} of N = {n_items}",
                marked.len()
            )));
        }
        Ok(Self {
            n_items,
            marked,
            is_marked,
            u: crate::angle::normalize_angle(u),
        })
    }

    /// Marks the first `n_marked` items.
    pub fn first_marked(n_items: usize, n_marked: usize, u: f64) -> Result<Self> {
        Self::new(n_items, 0..n_marked.min(n_items), u)
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn n_marked(&self) -> usize {
        self.marked.len()
    }

    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// The two-level description: sin β = √(M/N).
    pub fn initial_state(&self) -> InitialState {
        InitialState::uniform(self.n_items, self.n_marked(), self.u).expect("1 <= M < N")
    }

    pub fn marked_state(&self) -> FullState {
        let a = Complex64::new(1.0 / (self.n_marked() as f64).sqrt(), 0.0);
        FullState(
            self.is_marked
                .iter()
                .map(|&m| if m { a } else { Complex64::default() })
                .collect(),
        )
    }

    /// Normalized component of |s⟩ orthogonal to |w⟩: uniform over the
    /// unmarked items.
    pub fn perp_state(&self) -> FullState {
        let n_un = (self.n_items - self.n_marked()) as f64;
        let a = Complex64::new(1.0 / n_un.sqrt(), 0.0);
        FullState(
            self.is_marked
                .iter()
                .map(|&m| if m { Complex64::default() } else { a })
                .collect(),
        )
    }

    pub fn start_state(&self) -> FullState {
        let a = 1.0 / (self.n_items as f64).sqrt();
        let marked_amp = Complex64::from_polar(a, self.u);
        FullState(
            self.is_marked
                .iter()
                .map(|&m| {
                    if m {
                        marked_amp
                    } else {
                        Complex64::new(a, 0.0)
                    }
                })
                .collect(),
        )
    }

    /// Total probability on the marked items.
    pub fn marked_probability(&self, psi: &FullState) -> f64 {
        self.marked.iter().map(|&i| psi.0[i].norm_sqr()).sum()
    }
}

/// An N-component state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState(pub Vec<Complex64>);

impl FullState {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &FullState) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Dense N×N operator, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FullHamiltonian {
    n: usize,
    data: Vec<Complex64>,
}

impl FullHamiltonian {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks_exact(self.n)
    }

    /// out = H x
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (o, row) in out.iter_mut().zip(self.rows()) {
            *o = row.iter().zip(x).map(|(h, v)| h * v).sum();
        }
    }

    /// ⟨a|H|b⟩
    pub fn matrix_element(&self, a: &FullState, b: &FullState) -> Complex64 {
        let mut hb = vec![Complex64::default(); self.n];
        self.apply(&b.0, &mut hb);
        a.0.iter().zip(&hb).map(|(x, y)| x.conj() * y).sum()
    }

    /// max |H_ij − conj(H_ji)|
    pub fn hermiticity_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                d = d.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        d
    }

    /// Frobenius norm, an upper bound on the spectral radius.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|h| h.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Restriction to span{|w⟩, |w⊥⟩} in that basis order.
    pub fn restrict(&self, inst: &SearchInstance) -> Hamiltonian2 {
        let w = inst.marked_state();
        let p = inst.perp_state();
        Hamiltonian2::from_matrix(&[
            [self.matrix_element(&w, &w), self.matrix_element(&w, &p)],
            [self.matrix_element(&p, &w), self.matrix_element(&p, &p)],
        ])
    }
}

/// E_fg (|w⟩⟨w| + |s⟩⟨s|) + E_f (e^{iφ} |w⟩⟨s| + e^{−iφ} |s⟩⟨w|) on N items.
pub fn build_full_hamiltonian(
    inst: &SearchInstance,
    cp: &CouplingParams,
) -> Result<FullHamiltonian> {
    let n = inst.n_items();
    if n > MAX_ITEMS {
        return Err(SearchError::ScaleGuard(n, MAX_ITEMS));
    }
    let w = inst.marked_state().0;
    let s = inst.start_state().0;
    let e_fg = cp.e_fg();
    let f = Complex64::from_polar(cp.e_f(), cp.phi());
    let mut data = vec![Complex64::default(); n * n];
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = e_fg * (w[i] * w[j].conj() + s[i] * s[j].conj())
                + f * w[i] * s[j].conj()
                + f.conj() * s[i] * w[j].conj();
        }
    }
    Ok(FullHamiltonian { n, data })
}

/// Result of integrating the full-space dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct FullEvolution {
    /// Total marked probability at every integration step, t = 0 included.
    pub trace: ProbabilityTrace,
    /// Largest norm of the component outside span{|w⟩, |w⊥⟩}.
    pub max_leakage: f64,
    /// ‖ψ(t_max)‖ − 1, not corrected.
    pub norm_drift: f64,
}

/// RK4 on i dψ/dt = H ψ in dimension N from |s⟩, recording the marked
/// probability after every step. Requires dt · ‖H‖_F ≤ 0.05.
pub fn evolve_full(
    inst: &SearchInstance,
    cp: &CouplingParams,
    t_max: f64,
    dt: f64,
) -> Result<FullEvolution> {
    if !(t_max > 0.0) || !(dt > 0.0) {
        return Err(SearchError::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "t_max and dt must be positive",
        });
    }
    let h = build_full_hamiltonian(inst, cp)?;
    let radius = h.frobenius_norm();
    if dt * radius > STEP_LIMIT {
        return Err(SearchError::StepTooLarge {
            dt,
            scale_name: "|H|_F",
            product: dt * radius,
            limit: STEP_LIMIT,
        });
    }

    let w = inst.marked_state();
    let p = inst.perp_state();
    let leakage = |psi: &FullState| {
        let (cw, cp) = (w.inner(psi), p.inner(psi));
        psi.0
            .iter()
            .enumerate()
            .map(|(i, a)| (a - cw * w.0[i] - cp * p.0[i]).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };

    let (n_steps, step) = uniform_steps(t_max, dt);
    let mut psi = inst.start_state();
    let mut rk = Rk4::new(inst.n_items());
    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut max_leakage = leakage(&psi);
    samples.push(TraceSample {
        t: 0.0,
        p_w: inst.marked_probability(&psi),
    });
    for k in 1..=n_steps {
        rk.step(&mut psi.0, step, |x, out| h.apply(x, out));
        max_leakage = max_leakage.max(leakage(&psi));
        samples.push(TraceSample {
            t: if k == n_steps { t_max } else { k as f64 * step },
            p_w: inst.marked_probability(&psi),
        });
    }
    Ok(FullEvolution {
        trace: ProbabilityTrace::new(
            samples,
            step,
            format!(
                "N={} M={} u={} e_fg={} e_f={} phi={}",
                inst.n_items(),
                inst.n_marked(),
                inst.u(),
                cp.e_fg(),
                cp.e_f(),
                cp.phi()
            ),
        ),
        max_leakage,
        norm_drift: psi.norm() - 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmodel::to_spectral;
    use crate::timing::first_time_from_coupling;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn instance_validation() {
        assert!(SearchInstance::first_marked(4, 4, 0.0).is_err());
        assert!(SearchInstance::first_marked(4, 0, 0.0).is_err());
        assert!(SearchInstance::first_marked(1, 1, 0.0).is_err());
        assert!(SearchInstance::new(4, [5], 0.0).is_err());
        let inst = SearchInstance::new(8, [3, 1, 3], 0.0).unwrap();
        assert_eq!(inst.marked(), &[1, 3]);
        assert!((inst.initial_state().sin_beta() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn scale_guard() {
        let inst = SearchInstance::first_marked(MAX_ITEMS + 1, 1, 0.0).unwrap();
        let cp = CouplingParams::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(
            build_full_hamiltonian(&inst, &cp),
            Err(SearchError::ScaleGuard(MAX_ITEMS + 1, MAX_ITEMS))
        );
    }

    #[test]
    fn farhi_gutmann_n4() {
        let inst = SearchInstance::first_marked(4, 1, 0.0).unwrap();
        let h =
            build_full_hamiltonian(&inst, &CouplingParams::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        let w = inst.marked_state();
        assert!((h.matrix_element(&w, &w) - Complex64::new(1.25, 0.0)).norm() < 1e-15);
        assert!(h.hermiticity_defect() < 1e-14);
    }

    #[test]
    fn zero_couplings_give_zero_operator() {
        let inst = SearchInstance::first_marked(2, 1, 0.3).unwrap();
        let h =
            build_full_hamiltonian(&inst, &CouplingParams::new(0.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(h.frobenius_norm(), 0.0);
    }

    #[test]
    fn restriction_matches_two_level_form() {
        for (n, m, u) in [(4, 1, 0.0), (8, 2, 1.3), (13, 5, -2.2)] {
            let inst = SearchInstance::first_marked(n, m, u).unwrap();
            let cp = CouplingParams::new(0.7, 1.4, 2.5).unwrap();
            let h = build_full_hamiltonian(&inst, &cp).unwrap();
            let two = Hamiltonian2::from_coupling(&cp, &inst.initial_state());
            assert!(h.restrict(&inst).max_entry_diff(&two) < 1e-12);
        }
    }

    #[test]
    fn evolve_rejects_large_step() {
        let inst = SearchInstance::first_marked(4, 1, 0.0).unwrap();
        let cp = CouplingParams::new(1.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            evolve_full(&inst, &cp, 1.0, 0.1),
            Err(SearchError::StepTooLarge { .. })
        ));
    }

    #[test]
    fn farhi_gutmann_peak_n4() {
        let inst = SearchInstance::first_marked(4, 1, 0.0).unwrap();
        let cp = CouplingParams::new(1.0, 0.0, 0.0).unwrap();
        let run = evolve_full(&inst, &cp, 1.5 * PI, 1e-4).unwrap();
        let peak = run.trace.first_peak().unwrap();
        assert!((peak.t - PI).abs() < 1e-4, "peak at {}", peak.t);
        assert!(peak.p_w > 1.0 - 1e-8);
        assert!(run.max_leakage < 1e-8);
        assert!(run.norm_drift.abs() < 1e-10);
    }

    #[test]
    fn fenner_peak_n8() {
        let inst = SearchInstance::first_marked(8, 2, 0.0).unwrap();
        let cp = CouplingParams::new(0.0, 1.0, FRAC_PI_2).unwrap();
        let beta = 0.5f64.asin();
        let expected = (FRAC_PI_2 - beta) / beta.cos();
        let t1 = first_time_from_coupling(&cp, &inst.initial_state()).unwrap();
        assert!((t1 - expected).abs() < 1e-14);
        let run = evolve_full(&inst, &cp, 2.0 * expected, 1e-3).unwrap();
        let peak = run.trace.first_peak().unwrap();
        assert!((peak.t - expected).abs() <= run.trace.step);
    }

    fn dense_spectrum(h: &FullHamiltonian) -> Vec<f64> {
        let n = h.dim();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let z = h.get(i, j);
            nalgebra::Complex::new(z.re, z.im)
        });
        let mut eig: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        eig
    }

    fn expected_spectrum(n: usize, e1: f64, e2: f64) -> Vec<f64> {
        let mut v = vec![0.0; n - 2];
        v.extend([e1, e2]);
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn spectrum_n8() {
        let inst = SearchInstance::first_marked(8, 2, 0.0).unwrap();
        // E_fg = E_f makes det = cos²β (E_fg² − E_f²) vanish, so E₂ = 0 joins
        // the six-fold zero eigenvalue.
        for (e_fg, e_f) in [(1.0, 1.0), (1.0, 0.4), (0.3, 2.0)] {
            let cp = CouplingParams::new(e_fg, e_f, PI / 3.0).unwrap();
            let h = build_full_hamiltonian(&inst, &cp).unwrap();
            let sp = to_spectral(&cp, &inst.initial_state()).spectral;
            let eig = dense_spectrum(&h);
            let want = expected_spectrum(8, sp.e1(), sp.e2());
            for (a, b) in eig.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12, "{eig:?} vs {want:?}");
            }
            let det = sp.e1() * sp.e2();
            assert!((det - 0.75 * (e_fg * e_fg - e_f * e_f)).abs() < 1e-12);
        }
    }
}
