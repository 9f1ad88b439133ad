//! The 2×2 search Hamiltonian in the (|w⟩, |w⊥⟩) basis.

use num_complex::Complex64;

use crate::angle::{angles_close, ANGLE_TOL};
use crate::error::{Result, SearchError};
use crate::qmodel::{CouplingParams, InitialState, QubitState, SpectralParams};
use crate::timing::solve_mixing_angle;

/// Hermitian 2×2 matrix stored as its real diagonal and upper off-diagonal
/// entry, so Hermiticity holds by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian2 {
    h_ww: f64,
    h_wp: Complex64,
    h_pp: f64,
}

type Matrix2 = [[Complex64; 2]; 2];

fn outer(a: [Complex64; 2], b: [Complex64; 2]) -> Matrix2 {
    let mut m = [[Complex64::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i] * b[j].conj();
        }
    }
    m
}

fn add_scaled(acc: &mut Matrix2, m: &Matrix2, scale: Complex64) {
    for i in 0..2 {
        for j in 0..2 {
            acc[i][j] += scale * m[i][j];
        }
    }
}

impl Hamiltonian2 {
    pub fn new(h_ww: f64, h_wp: Complex64, h_pp: f64) -> Self {
        Self { h_ww, h_wp, h_pp }
    }

    /// Spectral form with an arbitrary mixing angle x:
    /// diagonal E_p ± E_o cos 2x, off-diagonal E_o sin 2x e^{±iα}.
    /// Its eigenvectors are |E₁⟩ = e^{iα} cos x |w⟩ + sin x |w⊥⟩ and
    /// |E₂⟩ = −sin x |w⟩ + e^{−iα} cos x |w⊥⟩.
    pub fn from_spectral_angle(sp: &SpectralParams, x: f64) -> Self {
        let (s2x, c2x) = (2.0 * x).sin_cos();
        Self {
            h_ww: sp.e_p() + sp.e_o() * c2x,
            h_wp: Complex64::from_polar(sp.e_o() * s2x, sp.alpha()),
            h_pp: sp.e_p() - sp.e_o() * c2x,
        }
    }

    /// Spectral form with x tuned to `init` so that |s⟩ reaches |w⟩ with
    /// certainty.
    pub fn from_spectral_tuned(sp: &SpectralParams, init: &InitialState) -> Result<Self> {
        let geom = solve_mixing_angle(init, sp.alpha())?;
        Ok(Self::from_spectral_angle(sp, geom.x()))
    }

    /// Coupling form:
    ///
    /// ```text
    /// h_ww = E_fg (1 + sin²β) + 2 E_f cos(φ−u) sin β
    /// h_wp = e^{iu} (E_f e^{i(φ−u)} + E_fg sin β) cos β
    /// h_pp = E_fg cos²β
    /// ```
    pub fn from_coupling(cp: &CouplingParams, init: &InitialState) -> Self {
        let (sb, cb) = (init.sin_beta(), init.cos_beta());
        let rel = cp.phi() - init.u();
        let inner = Complex64::from_polar(cp.e_f(), rel) + cp.e_fg() * sb;
        Self {
            h_ww: cp.e_fg() * (1.0 + sb * sb) + 2.0 * cp.e_f() * rel.cos() * sb,
            h_wp: Complex64::from_polar(cb, init.u()) * inner,
            h_pp: cp.e_fg() * cb * cb,
        }
    }

    /// E_fg (|w⟩⟨w| + |s⟩⟨s|) + E_f (e^{iφ} |w⟩⟨s| + e^{−iφ} |s⟩⟨w|),
    /// assembled from outer products of the state vectors.
    pub fn generalized_search(cp: &CouplingParams, init: &InitialState) -> Self {
        let w = QubitState::marked().amplitudes();
        let s = init.state().amplitudes();
        let mut m = [[Complex64::default(); 2]; 2];
        let e_fg = Complex64::new(cp.e_fg(), 0.0);
        add_scaled(&mut m, &outer(w, w), e_fg);
        add_scaled(&mut m, &outer(s, s), e_fg);
        add_scaled(
            &mut m,
            &outer(w, s),
            Complex64::from_polar(cp.e_f(), cp.phi()),
        );
        add_scaled(
            &mut m,
            &outer(s, w),
            Complex64::from_polar(cp.e_f(), -cp.phi()),
        );
        Self::from_matrix(&m)
    }

    /// E (|w⟩⟨w| + |s⟩⟨s|).
    pub fn farhi_gutmann(energy: f64, init: &InitialState) -> Self {
        Self::generalized_search(
            &CouplingParams::new(energy, 0.0, 0.0).expect("finite"),
            init,
        )
    }

    /// E i (|w⟩⟨s| − |s⟩⟨w|), i.e. φ = π/2 with no projector term.
    pub fn fenner(energy: f64, init: &InitialState) -> Result<Self> {
        let cp = CouplingParams::new(0.0, energy, std::f64::consts::FRAC_PI_2)?;
        Ok(Self::generalized_search(&cp, init))
    }

    /// Real-coupling special case φ ∈ {0, π}, u = 0, written through its
    /// mean energy and signed half-gap:
    ///
    /// ```text
    /// E_p = E_fg ± E_f sin β,   E_0 = E_f ± E_fg sin β
    /// H   = [[E_p ± E_0 sin β, ±E_0 cos β], [±E_0 cos β, E_p ∓ E_0 sin β]]
    /// ```
    ///
    /// Upper signs belong to φ = 0, lower signs to φ = π.
    pub fn bae_kwon(cp: &CouplingParams, init: &InitialState) -> Result<Self> {
        if !angles_close(init.u(), 0.0, ANGLE_TOL) {
            return Err(SearchError::InvalidParameter {
                name: "u",
                value: init.u(),
                reason: "the real-coupling form requires u = 0",
            });
        }
        let sign = if angles_close(cp.phi(), 0.0, ANGLE_TOL) {
            1.0
        } else if angles_close(cp.phi(), std::f64::consts::PI, ANGLE_TOL) {
            -1.0
        } else {
            return Err(SearchError::PhaseNotMultipleOfPi(cp.phi()));
        };
        let (sb, cb) = (init.sin_beta(), init.cos_beta());
        let e_p = cp.e_fg() + sign * cp.e_f() * sb;
        let e_0 = cp.e_f() + sign * cp.e_fg() * sb;
        Ok(Self {
            h_ww: e_p + sign * e_0 * sb,
            h_wp: Complex64::new(sign * e_0 * cb, 0.0),
            h_pp: e_p - sign * e_0 * sb,
        })
    }

    /// Takes the diagonal's real parts and the upper off-diagonal entry.
    pub fn from_matrix(m: &Matrix2) -> Self {
        Self {
            h_ww: m[0][0].re,
            h_wp: m[0][1],
            h_pp: m[1][1].re,
        }
    }

    pub fn h_ww(&self) -> f64 {
        self.h_ww
    }

    pub fn h_wp(&self) -> Complex64 {
        self.h_wp
    }

    pub fn h_pw(&self) -> Complex64 {
        self.h_wp.conj()
    }

    pub fn h_pp(&self) -> f64 {
        self.h_pp
    }

    pub fn matrix(&self) -> Matrix2 {
        [
            [Complex64::new(self.h_ww, 0.0), self.h_wp],
            [self.h_pw(), Complex64::new(self.h_pp, 0.0)],
        ]
    }

    pub fn trace(&self) -> f64 {
        self.h_ww + self.h_pp
    }

    /// E_p = (E₁ + E₂)/2.
    pub fn mean_energy(&self) -> f64 {
        0.5 * self.trace()
    }

    /// E_o = √(((h_ww − h_pp)/2)² + |h_wp|²).
    pub fn half_gap(&self) -> f64 {
        (0.5 * (self.h_ww - self.h_pp)).hypot(self.h_wp.norm())
    }

    /// (E₁, E₂) with E₁ ≥ E₂.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let (p, o) = (self.mean_energy(), self.half_gap());
        (p + o, p - o)
    }

    /// Largest absolute entrywise difference.
    pub fn max_entry_diff(&self, other: &Hamiltonian2) -> f64 {
        let (a, b) = (self.matrix(), other.matrix());
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((a[i][j] - b[i][j]).norm());
            }
        }
        d
    }

    /// H ψ as raw amplitudes.
    pub fn apply(&self, psi: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.h_ww * psi[0] + self.h_wp * psi[1],
            self.h_pw() * psi[0] + self.h_pp * psi[1],
        ]
    }
}
