//! Fixed-step classical fourth-order Runge–Kutta for i dψ/dt = H ψ.

use num_complex::Complex64;

/// Largest allowed product of step size and the relevant energy scale.
pub const STEP_LIMIT: f64 = 0.05;

/// Scratch buffers for integrating an `n`-component state.
pub struct Rk4 {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4 {
    pub fn new(n: usize) -> Self {
        let z = vec![Complex64::default(); n];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    /// One step of size `h`. `apply_h(x, out)` must write H x into `out`.
    pub fn step<F>(&mut self, psi: &mut [Complex64], h: f64, mut apply_h: F)
    where
        F: FnMut(&[Complex64], &mut [Complex64]),
    {
        let minus_i = Complex64::new(0.0, -1.0);
        let n = psi.len();

        apply_h(psi, &mut self.k1);
        self.k1.iter_mut().for_each(|k| *k *= minus_i);

        for i in 0..n {
            self.tmp[i] = psi[i] + 0.5 * h * self.k1[i];
        }
        apply_h(&self.tmp, &mut self.k2);
        self.k2.iter_mut().for_each(|k| *k *= minus_i);

        for i in 0..n {
            self.tmp[i] = psi[i] + 0.5 * h * self.k2[i];
        }
        apply_h(&self.tmp, &mut self.k3);
        self.k3.iter_mut().for_each(|k| *k *= minus_i);

        for i in 0..n {
            self.tmp[i] = psi[i] + h * self.k3[i];
        }
        apply_h(&self.tmp, &mut self.k4);
        self.k4.iter_mut().for_each(|k| *k *= minus_i);

        for i in 0..n {
            psi[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

/// Splits `t` into `n = ceil(t / dt)` equal steps of size `t / n ≤ dt`.
pub fn uniform_steps(t: f64, dt: f64) -> (usize, f64) {
    if t <= 0.0 {
        return (0, 0.0);
    }
    let n = (t / dt).ceil().max(1.0) as usize;
    (n, t / n as f64)
}
