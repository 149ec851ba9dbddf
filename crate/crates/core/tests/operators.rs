mod common;

use std::f64::consts::PI;

use common::white_field;
use nsrw_core::spectral::{dealias, divergence, gradient, relative_divergence};
use nsrw_core::{friedrichs_cutoff, leray_project, make_grid, ring_project, RingPartition, Space, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn parseval_on_random_fields() {
    let g = make_grid(2, 64, 2.0 * PI).unwrap();
    for seed in 0..100 {
        let f = white_field(&g, 2, seed);
        let phys = f.to_physical().unwrap();
        let lp2 = phys.lp_norm(2.0).unwrap();
        assert!(common::rel(f.l2_norm(), lp2) < 1e-12);
        let back = phys.to_fourier().unwrap();
        assert!(back.max_abs_diff(&f) < 1e-12 * f.max_abs());
    }
}

#[test]
fn leray_is_idempotent_and_kills_gradients() {
    let g = make_grid(2, 64, 2.0 * PI).unwrap();
    for seed in 0..100 {
        let f = white_field(&g, 2, seed);
        let p = leray_project(&f).unwrap();
        let pp = leray_project(&p).unwrap();
        assert!(pp.sub(&p).unwrap().l2_norm() / f.l2_norm() < 1e-13);
        assert!(relative_divergence(&p).unwrap() < 1e-13);

        let phi = white_field(&g, 1, 1000 + seed);
        let grad = gradient(&phi).unwrap();
        assert!(leray_project(&grad).unwrap().l2_norm() / grad.l2_norm() < 1e-13);
    }
}

#[test]
fn rings_partition_the_lattice() {
    for (dim, n) in [(2, 64), (3, 16)] {
        let g = make_grid(dim, n, 2.0 * PI).unwrap();
        let part = RingPartition::new(&g);
        let total: usize = (1..=part.max_ring()).map(|r| part.occupancy(r)).sum();
        assert_eq!(part.occupancy(0), 0);
        assert_eq!(total, g.len());
        for seed in 0..(if dim == 2 { 100 } else { 5 }) {
            let f = white_field(&g, dim, seed);
            let mut sum = SpectralField::zero_vector(&g, Space::Fourier);
            for r in 1..=part.max_ring() {
                sum.axpy(1.0, &ring_project(&f, &part, r).unwrap()).unwrap();
            }
            assert!(sum.max_abs_diff(&f) < 1e-14 * f.max_abs().max(1.0));
        }
    }
}

#[test]
fn friedrichs_cutoff_is_idempotent_and_commutes() {
    let g = make_grid(2, 64, 2.0 * PI).unwrap();
    for seed in 0..100 {
        let f = white_field(&g, 2, seed);
        let radius = 3.0 + (seed % 17) as f64;
        let j = friedrichs_cutoff(&f, radius).unwrap();
        assert_eq!(friedrichs_cutoff(&j, radius).unwrap(), j);
        let a = divergence(&j).unwrap();
        let b = friedrichs_cutoff(&divergence(&f).unwrap(), radius).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-14 * b.max_abs().max(1.0));
    }
}

#[test]
fn rings_and_cutoff_commute() {
    let g = make_grid(2, 32, 2.0 * PI).unwrap();
    let part = RingPartition::new(&g);
    let f = white_field(&g, 2, 7);
    for r in [1, 5, 40, 150] {
        let a = ring_project(&friedrichs_cutoff(&f, 9.0).unwrap(), &part, r).unwrap();
        let b = friedrichs_cutoff(&ring_project(&f, &part, r).unwrap(), 9.0).unwrap();
        assert_eq!(a, b);
        let da = divergence(&ring_project(&f, &part, r).unwrap()).unwrap();
        let db = ring_project(&divergence(&f).unwrap(), &part, r).unwrap();
        assert!(da.max_abs_diff(&db) < 1e-13);
    }
}

fn seq_norm(values: &[Complex64], p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    } else {
        values.iter().map(|v| v.norm().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

#[test]
fn discrete_hausdorff_young() {
    // unitary DFT: ‖Ux‖_{p'} ≤ M^{1/p' - 1/2} ‖x‖_p for 1 ≤ p ≤ 2
    let g = make_grid(2, 32, 2.0 * PI).unwrap();
    let m = g.len() as f64;
    for seed in 0..50 {
        let f = white_field(&g, 1, seed);
        let x = f.to_physical().unwrap();
        for p in [1.0, 4.0 / 3.0, 2.0] {
            let q = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
            let lhs = seq_norm(f.component(0), q);
            let rhs = m.powf(1.0 / q - 0.5) * seq_norm(x.component(0), p);
            assert!(lhs <= rhs * (1.0 + 1e-10), "p = {p}: {lhs} > {rhs}");
        }
    }
}

#[test]
fn dealiased_product_is_the_truncated_convolution() {
    let n = 16;
    let g = make_grid(2, n, 2.0 * PI).unwrap();
    let a = dealias(&white_field(&g, 1, 1)).unwrap();
    let b = dealias(&white_field(&g, 1, 2)).unwrap();
    let pa = a.to_physical().unwrap();
    let pb = b.to_physical().unwrap();
    let prod: Vec<Complex64> = pa.component(0).iter().zip(pb.component(0)).map(|(x, y)| x * y).collect();
    let product = SpectralField::from_components(&g, vec![prod], Space::Physical)
        .unwrap()
        .to_fourier()
        .unwrap();
    let product = dealias(&product).unwrap();

    let band = (n / 3) as i64;
    let scale = 1.0 / (g.len() as f64).sqrt();
    for idx in 0..g.len() {
        let k = g.integer_mode(idx);
        if k[0].abs() > band || k[1].abs() > band {
            assert_eq!(product.component(0)[idx], Complex64::new(0.0, 0.0));
            continue;
        }
        let mut exact = Complex64::new(0.0, 0.0);
        for m0 in -band..=band {
            for m1 in -band..=band {
                let r = [k[0] - m0, k[1] - m1];
                if r[0].abs() > band || r[1].abs() > band {
                    continue;
                }
                let ia = g.index_of(&[m0, m1]).unwrap();
                let ib = g.index_of(&r).unwrap();
                exact += a.component(0)[ia] * b.component(0)[ib];
            }
        }
        exact *= scale;
        assert!((exact - product.component(0)[idx]).norm() < 1e-13, "mode {k:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn leray_commutes_with_cutoff(seed in any::<u64>(), radius in 0.5f64..30.0) {
        let g = make_grid(2, 32, 2.0 * PI).unwrap();
        let f = white_field(&g, 2, seed);
        let a = leray_project(&friedrichs_cutoff(&f, radius).unwrap()).unwrap();
        let b = friedrichs_cutoff(&leray_project(&f).unwrap(), radius).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn fourier_round_trip(seed in any::<u64>(), length in 0.5f64..20.0) {
        let g = make_grid(2, 16, length).unwrap();
        let f = white_field(&g, 2, seed);
        let back = f.to_physical().unwrap().to_fourier().unwrap();
        prop_assert!(back.max_abs_diff(&f) < 1e-13);
    }
}
