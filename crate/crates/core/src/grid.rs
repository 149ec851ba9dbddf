//! Periodic box discretization and the matching discrete frequency lattice.
//!
//! Coefficients are stored flat in row-major order over `d` axes of `n`
//! points each. Along an axis, storage index `i` carries the integer
//! frequency `i` for `i < n/2` and `i - n` otherwise, so index `n/2` is the
//! Nyquist frequency `-n/2`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub struct Grid {
    dim: usize,
    n: usize,
    length: f64,
    dk: f64,
    axis: Vec<f64>,
    ksq: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.length.to_bits() == other.length.to_bits()
    }
}

/// Builds a `dim`-dimensional periodic grid with `n` points per axis and
/// period `length`.
pub fn make_grid(dim: usize, n: usize, length: f64) -> Result<Arc<Grid>> {
    Grid::new(dim, n, length).map(Arc::new)
}

impl Grid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and at least 8, got {n}"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!("period must be positive, got {length}")));
        }
        let dk = 2.0 * PI / length;
        let axis: Vec<f64> = (0..n).map(|i| signed_index(i, n) as f64 * dk).collect();
        let total = n.pow(dim as u32);
        let mut ksq = vec![0.0; total];
        for (idx, k2) in ksq.iter_mut().enumerate() {
            let mut rem = idx;
            let mut acc = 0.0;
            for _ in 0..dim {
                let k = axis[rem % n];
                acc += k * k;
                rem /= n;
            }
            *k2 = acc;
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            dim,
            n,
            length,
            dk,
            axis,
            ksq,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Lattice spacing `2π/L`.
    pub fn dk(&self) -> f64 {
        self.dk
    }

    /// Total number of grid points (and of lattice frequencies).
    pub fn len(&self) -> usize {
        self.ksq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ksq.is_empty()
    }

    /// Physical cell volume `(L/N)^d`.
    pub fn cell_volume(&self) -> f64 {
        (self.length / self.n as f64).powi(self.dim as i32)
    }

    pub fn ksq(&self) -> &[f64] {
        &self.ksq
    }

    pub fn axis_wavenumbers(&self) -> &[f64] {
        &self.axis
    }

    /// `e^{-t|ξ|²}` at every mode, built from per-axis factors.
    pub fn heat_symbol(&self, t: f64) -> Vec<f64> {
        let e: Vec<f64> = self.axis.iter().map(|k| (-t * k * k).exp()).collect();
        let n = self.n;
        let lines = self.len() / n;
        let mut out = Vec::with_capacity(self.len());
        for line in 0..lines {
            let a = if self.dim == 2 { e[line] } else { e[line / n] * e[line % n] };
            out.extend(e.iter().map(|c| a * c));
        }
        out
    }

    /// Largest resolved wavenumber along one axis, `N/2 · 2π/L`.
    pub fn k_max(&self) -> f64 {
        (self.n / 2) as f64 * self.dk
    }

    /// Two-thirds-rule cut, `N/3 · 2π/L`.
    pub fn dealias_cut(&self) -> f64 {
        self.n as f64 / 3.0 * self.dk
    }

    /// Per-axis storage indices of a flat index, slowest axis first.
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        let mut rem = idx;
        for a in (0..self.dim).rev() {
            out[a] = rem % self.n;
            rem /= self.n;
        }
        out
    }

    /// Integer frequency vector at a flat index (unused axes are 0).
    pub fn integer_mode(&self, idx: usize) -> [i64; 3] {
        let ix = self.unravel(idx);
        let mut m = [0; 3];
        for a in 0..self.dim {
            m[a] = signed_index(ix[a], self.n);
        }
        m
    }

    /// Wavevector ξ at a flat index (unused axes are 0).
    pub fn mode(&self, idx: usize) -> [f64; 3] {
        let ix = self.unravel(idx);
        let mut k = [0.0; 3];
        for a in 0..self.dim {
            k[a] = self.axis[ix[a]];
        }
        k
    }

    /// Flat index of an integer frequency, if it lies on the lattice.
    pub fn index_of(&self, m: &[i64]) -> Option<usize> {
        if m.len() != self.dim {
            return None;
        }
        let half = (self.n / 2) as i64;
        let mut idx = 0;
        for &mi in m {
            if mi < -half || mi >= half {
                return None;
            }
            let i = if mi < 0 { mi + self.n as i64 } else { mi } as usize;
            idx = idx * self.n + i;
        }
        Some(idx)
    }

    /// Index of the frequency `-ξ`.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let ix = self.unravel(idx);
        let mut out = 0;
        for &i in ix.iter().take(self.dim) {
            out = out * self.n + (self.n - i) % self.n;
        }
        out
    }

    /// True when any axis of the frequency sits on the Nyquist index.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let ix = self.unravel(idx);
        ix.iter().take(self.dim).any(|&i| i == self.n / 2)
    }

    /// Physical coordinates of a grid point.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let ix = self.unravel(idx);
        let h = self.length / self.n as f64;
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = ix[a] as f64 * h;
        }
        x
    }

    /// Unitary in-place d-dimensional DFT.
    pub(crate) fn fft(&self, data: &mut [Complex64], inverse: bool) {
        debug_assert_eq!(data.len(), self.len());
        let plan = if inverse { &self.inv } else { &self.fwd };
        let n = self.n;
        let total = data.len();
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        let mut lines = vec![Complex64::default(); total];
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            if stride == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            let block = stride * n;
            // gather every line along `axis` into contiguous storage
            let mut l = 0;
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for j in 0..n {
                        lines[l * n + j] = data[base + j * stride];
                    }
                    l += 1;
                }
            }
            plan.process_with_scratch(&mut lines, &mut scratch);
            let mut l = 0;
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for j in 0..n {
                        data[base + j * stride] = lines[l * n + j];
                    }
                    l += 1;
                }
            }
        }
        let scale = 1.0 / (total as f64).sqrt();
        for c in data.iter_mut() {
            *c *= scale;
        }
    }
}

fn signed_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_lattice_on_two_pi_box() {
        let g = make_grid(2, 8, 2.0 * PI).unwrap();
        assert_eq!(g.len(), 64);
        let mut seen = std::collections::BTreeSet::new();
        for idx in 0..g.len() {
            let m = g.integer_mode(idx);
            assert!((-4..=3).contains(&m[0]) && (-4..=3).contains(&m[1]));
            let k = g.mode(idx);
            assert!((k[0] - m[0] as f64).abs() < 1e-14);
            seen.insert((m[0], m[1]));
        }
        assert_eq!(seen.len(), 64);
        let zeros = (0..g.len()).filter(|&i| g.ksq()[i] == 0.0).count();
        assert_eq!(zeros, 1);
        assert!(g.is_nyquist(g.index_of(&[-4, 1]).unwrap()));
        assert!(!g.is_nyquist(g.index_of(&[3, -3]).unwrap()));
    }

    #[test]
    fn three_d_point_count() {
        let g = make_grid(3, 16, 2.0 * PI).unwrap();
        assert_eq!(g.len(), 16 * 16 * 16);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(make_grid(2, 7, 1.0), Err(Error::InvalidGrid(_))));
        assert!(make_grid(4, 8, 1.0).is_err());
        assert!(make_grid(1, 8, 1.0).is_err());
        assert!(make_grid(2, 8, 0.0).is_err());
        assert!(make_grid(2, 8, -1.0).is_err());
        assert!(make_grid(2, 6, 1.0).is_err());
    }

    #[test]
    fn heat_symbol_matches_ksq() {
        for dim in [2, 3] {
            let g = make_grid(dim, 8, 3.0).unwrap();
            let h = g.heat_symbol(0.37);
            for (a, k) in h.iter().zip(g.ksq()) {
                assert!((a - (-0.37 * k).exp()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn conjugate_and_index_round_trip() {
        let g = make_grid(3, 8, 3.0).unwrap();
        for idx in 0..g.len() {
            let m = g.integer_mode(idx);
            assert_eq!(g.index_of(&m[..3]), Some(idx));
            let c = g.conjugate_index(idx);
            if !g.is_nyquist(idx) {
                let mc = g.integer_mode(c);
                assert_eq!([mc[0], mc[1], mc[2]], [-m[0], -m[1], -m[2]]);
            }
            assert_eq!(g.conjugate_index(c), idx);
        }
    }
}
