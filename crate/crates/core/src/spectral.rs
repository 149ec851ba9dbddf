//! Fourier-multiplier operators: ring partition and ring projections, the
//! Friedrichs cutoff, the Leray projector, derivative and Sobolev symbols,
//! and two-thirds dealiasing.
//!
//! All of these act diagonally on the frequency lattice (Leray acts on the
//! vector at each mode), so they commute with one another and with
//! derivatives.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Space, SpectralField};
use crate::grid::Grid;

/// Ring index of a frequency: the unique `n ≥ 1` with
/// `(n-1)^{1/d} ≤ |ξ| < n^{1/d}`, i.e. `⌊|ξ|^d⌋ + 1`.
pub fn ring_index(xi: &[f64], d: usize) -> usize {
    let ksq: f64 = xi.iter().map(|k| k * k).sum();
    ring_index_from_ksq(ksq, d)
}

fn ring_index_from_ksq(ksq: f64, d: usize) -> usize {
    // |ξ|^d without a lossy root for d = 2
    let pow = match d {
        2 => ksq,
        3 => ksq * ksq.sqrt(),
        _ => ksq.powf(d as f64 / 2.0),
    };
    pow.floor() as usize + 1
}

/// Precomputed ring index of every lattice frequency.
#[derive(Clone, Debug)]
pub struct RingPartition {
    grid: Arc<Grid>,
    index: Vec<u32>,
    max_ring: usize,
    occupancy: Vec<usize>,
}

impl RingPartition {
    pub fn new(grid: &Arc<Grid>) -> Self {
        let d = grid.dim();
        let index: Vec<u32> = grid
            .ksq()
            .iter()
            .map(|&k2| ring_index_from_ksq(k2, d) as u32)
            .collect();
        let max_ring = index.iter().copied().max().unwrap_or(1) as usize;
        let mut occupancy = vec![0; max_ring + 1];
        for &n in &index {
            occupancy[n as usize] += 1;
        }
        Self {
            grid: grid.clone(),
            index,
            max_ring,
            occupancy,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Ring index of the frequency stored at flat index `idx`.
    pub fn index_of(&self, idx: usize) -> usize {
        self.index[idx] as usize
    }

    pub fn indices(&self) -> &[u32] {
        &self.index
    }

    /// Largest ring index that has a lattice point.
    pub fn max_ring(&self) -> usize {
        self.max_ring
    }

    /// Number of lattice points in ring `n` (zero when out of range).
    pub fn occupancy(&self, n: usize) -> usize {
        self.occupancy.get(n).copied().unwrap_or(0)
    }

    /// Rings `1..=max_ring` with no lattice point.
    pub fn empty_rings(&self) -> usize {
        self.occupancy[1..].iter().filter(|&&c| c == 0).count()
    }
}

/// Keeps only the coefficients in ring `n`.
pub fn ring_project(field: &SpectralField, partition: &RingPartition, n: usize) -> Result<SpectralField> {
    if n < 1 {
        return Err(Error::InvalidRing(n));
    }
    field.expect_space(Space::Fourier)?;
    check_partition(field, partition)?;
    let mut out = field.clone();
    out.retain_modes(|idx| partition.index_of(idx) == n);
    Ok(out)
}

pub(crate) fn check_partition(field: &SpectralField, partition: &RingPartition) -> Result<()> {
    if !Arc::ptr_eq(field.grid(), partition.grid()) && **field.grid() != **partition.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Sharp truncation to the open ball `|ξ| < radius`.
pub fn friedrichs_cutoff(field: &SpectralField, radius: f64) -> Result<SpectralField> {
    let mut out = field.clone();
    friedrichs_cutoff_in_place(&mut out, radius)?;
    Ok(out)
}

pub fn friedrichs_cutoff_in_place(field: &mut SpectralField, radius: f64) -> Result<()> {
    field.expect_space(Space::Fourier)?;
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("cutoff radius must be positive, got {radius}")));
    }
    let g = field.grid().clone();
    let r2 = radius * radius;
    field.retain_modes(|idx| g.ksq()[idx] < r2);
    Ok(())
}

/// Leray–Hopf projection `(I - ξξᵀ/|ξ|²)` at every mode; ξ = 0 passes
/// through unchanged.
pub fn leray_project(field: &SpectralField) -> Result<SpectralField> {
    let mut out = field.clone();
    leray_project_in_place(&mut out)?;
    Ok(out)
}

pub fn leray_project_in_place(field: &mut SpectralField) -> Result<()> {
    field.expect_space(Space::Fourier)?;
    field.expect_vector()?;
    let g = field.grid().clone();
    let d = g.dim();
    let comps = field.components_mut();
    for idx in 1..g.len() {
        let k2 = g.ksq()[idx];
        let xi = g.mode(idx);
        let mut dot = Complex64::default();
        for a in 0..d {
            dot += comps[a][idx] * xi[a];
        }
        let s = dot / k2;
        for a in 0..d {
            comps[a][idx] -= s * xi[a];
        }
    }
    Ok(())
}

/// Diagonal Fourier symbols.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Multiplier {
    /// `∂_axis`, symbol `i ξ_axis`, applied to every component.
    Gradient(usize),
    /// `∇·`, vector to scalar.
    Divergence,
    /// `(-Δ)^{σ/2}`, symbol `|ξ|^σ`.
    FractionalLaplacian(f64),
    /// `⟨√-Δ⟩^s`, symbol `(1 + |ξ|²)^{s/2}`.
    Bracket(f64),
}

pub fn multiplier(field: &SpectralField, kind: Multiplier) -> Result<SpectralField> {
    field.expect_space(Space::Fourier)?;
    let g = field.grid().clone();
    match kind {
        Multiplier::Gradient(axis) => {
            if axis >= g.dim() {
                return Err(Error::InvalidArgument(format!("axis {axis} out of range")));
            }
            let mut out = field.clone();
            for c in out.components_mut() {
                for (idx, v) in c.iter_mut().enumerate() {
                    *v *= Complex64::new(0.0, derivative_symbol(&g, idx, axis));
                }
            }
            Ok(out)
        }
        Multiplier::Divergence => divergence(field),
        Multiplier::FractionalLaplacian(sigma) => {
            if sigma < 0.0 && field.mean_magnitude() != 0.0 {
                return Err(Error::NonzeroMean);
            }
            Ok(field.apply_symbol(|idx| fractional_symbol(g.ksq()[idx], sigma)))
        }
        Multiplier::Bracket(s) => Ok(field.apply_symbol(|idx| (1.0 + g.ksq()[idx]).powf(0.5 * s))),
    }
}

/// `|ξ|^σ` with the conventions `|0|^0 = 1` and zero at ξ = 0 otherwise.
pub fn fractional_symbol(ksq: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        1.0
    } else if ksq == 0.0 {
        0.0
    } else {
        ksq.powf(0.5 * sigma)
    }
}

/// Real derivative symbol `ξ_axis`, zero on the Nyquist row.
pub(crate) fn derivative_symbol(g: &Grid, idx: usize, axis: usize) -> f64 {
    if g.is_nyquist(idx) {
        0.0
    } else {
        g.mode(idx)[axis]
    }
}

pub fn divergence(field: &SpectralField) -> Result<SpectralField> {
    field.expect_space(Space::Fourier)?;
    field.expect_vector()?;
    let g = field.grid().clone();
    let mut out = SpectralField::zeros(&g, 1, Space::Fourier);
    let comps = field.components();
    let dst = &mut out.components_mut()[0];
    for (idx, v) in dst.iter_mut().enumerate() {
        let mut acc = Complex64::default();
        for (a, c) in comps.iter().enumerate() {
            acc += c[idx] * derivative_symbol(&g, idx, a);
        }
        *v = Complex64::new(0.0, 1.0) * acc;
    }
    Ok(out)
}

/// Gradient of a scalar field as a `d`-component vector field.
pub fn gradient(scalar: &SpectralField) -> Result<SpectralField> {
    scalar.expect_space(Space::Fourier)?;
    if scalar.num_components() != 1 {
        return Err(Error::ComponentMismatch {
            expected: 1,
            found: scalar.num_components(),
        });
    }
    let g = scalar.grid().clone();
    let src = scalar.component(0);
    let comps = (0..g.dim())
        .map(|a| {
            src.iter()
                .enumerate()
                .map(|(idx, v)| v * Complex64::new(0.0, derivative_symbol(&g, idx, a)))
                .collect()
        })
        .collect();
    SpectralField::from_components(&g, comps, Space::Fourier)
}

/// ‖div f‖ / ‖f‖, or 0 for the zero field.
pub fn relative_divergence(field: &SpectralField) -> Result<f64> {
    let norm = field.l2_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(divergence(field)?.l2_norm() / norm)
}

/// Two-thirds rule: zero every mode with some `|ξ_i| > N/3 · 2π/L`.
pub fn dealias(field: &SpectralField) -> Result<SpectralField> {
    let mut out = field.clone();
    dealias_in_place(&mut out)?;
    Ok(out)
}

pub fn dealias_in_place(field: &mut SpectralField) -> Result<()> {
    field.expect_space(Space::Fourier)?;
    let g = field.grid().clone();
    let n = g.n() as i64;
    field.retain_modes(|idx| {
        let m = g.integer_mode(idx);
        m.iter().all(|&mi| 3 * mi.abs() <= n)
    });
    Ok(())
}

/// `‖⟨√-Δ⟩^s f‖_{L²}`, the inhomogeneous Sobolev norm of order `s`.
pub fn sobolev_norm(field: &SpectralField, s: f64) -> Result<f64> {
    field.expect_space(Space::Fourier)?;
    let g = field.grid();
    let ksq = g.ksq();
    let sum: f64 = field
        .components()
        .iter()
        .flat_map(|c| c.iter().enumerate())
        .map(|(idx, v)| (1.0 + ksq[idx]).powf(s) * v.norm_sqr())
        .sum();
    Ok((sum * g.cell_volume()).sqrt())
}

/// `(Σ_ξ |ξ|^{2k} |f̂(ξ)|² · vol)^{1/2}`, i.e. ‖∇^k f‖_{L²} with `∇^k` the
/// full derivative tensor.
pub fn derivative_l2_norm(field: &SpectralField, k: u32) -> Result<f64> {
    field.expect_space(Space::Fourier)?;
    let g = field.grid();
    let ksq = g.ksq();
    let sum: f64 = field
        .components()
        .iter()
        .flat_map(|c| c.iter().enumerate())
        .map(|(idx, v)| ksq[idx].powi(k as i32) * v.norm_sqr())
        .sum();
    Ok((sum * g.cell_volume()).sqrt())
}
