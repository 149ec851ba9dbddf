//! Multi-component fields on a [`Grid`], held either as unitary Fourier
//! coefficients or as physical-space samples.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    Fourier,
    Physical,
}

impl Space {
    fn name(self) -> &'static str {
        match self {
            Space::Fourier => "fourier",
            Space::Physical => "physical",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// physical → fourier
    Forward,
    /// fourier → physical
    Inverse,
}

#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Arc<Grid>,
    comps: Vec<Vec<Complex64>>,
    space: Space,
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        *self.grid == *other.grid && self.space == other.space && self.comps == other.comps
    }
}

impl SpectralField {
    pub fn zeros(grid: &Arc<Grid>, components: usize, space: Space) -> Self {
        Self {
            grid: grid.clone(),
            comps: vec![vec![Complex64::default(); grid.len()]; components],
            space,
        }
    }

    /// Zero vector field with `grid.dim()` components.
    pub fn zero_vector(grid: &Arc<Grid>, space: Space) -> Self {
        Self::zeros(grid, grid.dim(), space)
    }

    pub fn from_components(grid: &Arc<Grid>, comps: Vec<Vec<Complex64>>, space: Space) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::InvalidArgument("field needs at least one component".into()));
        }
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::InvalidArgument(format!(
                "component length must be {}",
                grid.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            comps,
            space,
        })
    }

    /// Samples a real vector (or scalar) function at the grid points.
    pub fn from_fn<F>(grid: &Arc<Grid>, components: usize, f: F) -> Self
    where
        F: Fn([f64; 3]) -> Vec<f64>,
    {
        let mut out = Self::zeros(grid, components, Space::Physical);
        for idx in 0..grid.len() {
            let v = f(grid.position(idx));
            for (c, val) in out.comps.iter_mut().zip(v) {
                c[idx] = Complex64::new(val, 0.0);
            }
        }
        out
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn num_components(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.comps
    }

    pub fn component(&self, i: usize) -> &[Complex64] {
        &self.comps[i]
    }

    pub fn into_components(self) -> Vec<Vec<Complex64>> {
        self.comps
    }

    pub fn expect_space(&self, space: Space) -> Result<()> {
        if self.space != space {
            return Err(Error::SpaceMismatch {
                expected: space.name(),
                found: self.space.name(),
            });
        }
        Ok(())
    }

    pub fn expect_vector(&self) -> Result<()> {
        if self.comps.len() != self.grid.dim() {
            return Err(Error::ComponentMismatch {
                expected: self.grid.dim(),
                found: self.comps.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn expect_compatible(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && *self.grid != *other.grid {
            return Err(Error::GridMismatch);
        }
        if self.comps.len() != other.comps.len() {
            return Err(Error::ComponentMismatch {
                expected: self.comps.len(),
                found: other.comps.len(),
            });
        }
        other.expect_space(self.space)
    }

    /// Unitary DFT in the requested direction.
    pub fn transform(&self, direction: Direction) -> Result<Self> {
        self.clone().into_transformed(direction)
    }

    pub fn into_transformed(mut self, direction: Direction) -> Result<Self> {
        let (from, to) = match direction {
            Direction::Forward => (Space::Physical, Space::Fourier),
            Direction::Inverse => (Space::Fourier, Space::Physical),
        };
        self.expect_space(from)?;
        let inverse = direction == Direction::Inverse;
        for c in &mut self.comps {
            self.grid.fft(c, inverse);
        }
        self.space = to;
        Ok(self)
    }

    pub fn to_fourier(&self) -> Result<Self> {
        self.transform(Direction::Forward)
    }

    pub fn to_physical(&self) -> Result<Self> {
        self.transform(Direction::Inverse)
    }

    /// Multiplies every component by the real symbol `m(idx)`.
    pub fn apply_symbol<F>(&self, m: F) -> Self
    where
        F: Fn(usize) -> f64,
    {
        let mut out = self.clone();
        out.apply_symbol_in_place(m);
        out
    }

    pub fn apply_symbol_in_place<F>(&mut self, m: F)
    where
        F: Fn(usize) -> f64,
    {
        for c in &mut self.comps {
            for (idx, v) in c.iter_mut().enumerate() {
                *v *= m(idx);
            }
        }
    }

    /// Zeroes every coefficient for which `keep(idx)` is false.
    pub fn retain_modes<F>(&mut self, keep: F)
    where
        F: Fn(usize) -> bool,
    {
        for c in &mut self.comps {
            for (idx, v) in c.iter_mut().enumerate() {
                if !keep(idx) {
                    *v = Complex64::default();
                }
            }
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale_in_place(a);
        out
    }

    pub fn scale_in_place(&mut self, a: f64) {
        for c in &mut self.comps {
            for v in c.iter_mut() {
                *v *= a;
            }
        }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Self) -> Result<()> {
        self.expect_compatible(other)?;
        for (c, o) in self.comps.iter_mut().zip(&other.comps) {
            for (v, w) in c.iter_mut().zip(o) {
                *v += w * a;
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// Box L² norm, valid in either space by Parseval.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_volume() * self.sum_sq()).sqrt()
    }

    /// Plain ℓ² norm of the stored numbers, without volume weight.
    pub fn coefficient_norm(&self) -> f64 {
        self.sum_sq().sqrt()
    }

    fn sum_sq(&self) -> f64 {
        self.comps.iter().flatten().map(|v| v.norm_sqr()).sum()
    }

    /// Real part of the volume-weighted inner product.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.expect_compatible(other)?;
        let s: f64 = self
            .comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b))
            .map(|(x, y)| (x.conj() * y).re)
            .sum();
        Ok(s * self.grid.cell_volume())
    }

    /// Box L^p norm of the pointwise Euclidean magnitude; `p = ∞` gives
    /// the maximum over grid points. Requires physical space.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        self.expect_space(Space::Physical)?;
        let n = self.grid.len();
        if p.is_infinite() {
            return Ok((0..n).map(|i| self.magnitude_sq(i)).fold(0.0, f64::max).sqrt());
        }
        let half = p / 2.0;
        let s: f64 = if half.fract() == 0.0 && half <= 16.0 {
            let e = half as i32;
            (0..n).map(|i| self.magnitude_sq(i).powi(e)).sum()
        } else {
            (0..n).map(|i| self.magnitude_sq(i).powf(half)).sum()
        };
        Ok((s * self.grid.cell_volume()).powf(1.0 / p))
    }

    fn magnitude_sq(&self, idx: usize) -> f64 {
        self.comps.iter().map(|c| c[idx].norm_sqr()).sum()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest imaginary part in physical space; measures how far the
    /// field is from representing a real function.
    pub fn max_imag(&self) -> Result<f64> {
        self.expect_space(Space::Physical)?;
        Ok(self.comps.iter().flatten().map(|v| v.im.abs()).fold(0.0, f64::max))
    }

    /// Drops imaginary parts in physical space.
    pub fn make_real(&mut self) -> Result<()> {
        self.expect_space(Space::Physical)?;
        for v in self.comps.iter_mut().flatten() {
            v.im = 0.0;
        }
        Ok(())
    }

    /// Replaces each coefficient pair by its Hermitian-symmetric part so
    /// that the field represents a real function; Nyquist and ξ = 0 modes
    /// become real.
    pub fn symmetrize(&mut self) -> Result<()> {
        self.expect_space(Space::Fourier)?;
        let g = self.grid.clone();
        for c in &mut self.comps {
            for idx in 0..g.len() {
                let j = g.conjugate_index(idx);
                if j < idx {
                    continue;
                }
                let avg = 0.5 * (c[idx] + c[j].conj());
                c[idx] = avg;
                c[j] = avg.conj();
            }
        }
        Ok(())
    }

    /// Zeroes Nyquist-row coefficients.
    pub fn zero_nyquist(&mut self) {
        let g = self.grid.clone();
        self.retain_modes(|idx| !g.is_nyquist(idx));
    }

    /// Zeroes the ξ = 0 coefficient.
    pub fn zero_mean(&mut self) {
        for c in &mut self.comps {
            c[0] = Complex64::default();
        }
    }

    /// Coefficient magnitude at ξ = 0 across components.
    pub fn mean_magnitude(&self) -> f64 {
        self.comps.iter().map(|c| c[0].norm_sqr()).sum::<f64>().sqrt()
    }
}
