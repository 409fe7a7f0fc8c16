//! Property-based checks of the physical and I/O invariants on random
//! inputs.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use proptest::prelude::*;
use weyl_arc_sim::analysis::{bloch_map, extract_j12, far_field, momentum_distribution, FarFieldSpec, MomentumGrid};
use weyl_arc_sim::cli::{BinaryGrid, Columnar};
use weyl_arc_sim::dynamics::concurrence_of;
use weyl_arc_sim::lattice::{build_finite, Geometry, ModelParams, SlabSpec, Sublattice};
use weyl_arc_sim::linalg::C64;
use weyl_arc_sim::topology::{analytic_phase, chern_closed_form, chern_reduced_with, classify_phase};

fn amplitude() -> impl Strategy<Value = C64> {
    (0.0..1.0f64, -3.2..3.2f64).prop_map(|(r, ph)| C64::from_polar(r, ph))
}

fn state(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b)), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn concurrence_is_bounded_by_the_populations(c1 in amplitude(), c2 in amplitude()) {
        // a normalised single-excitation state has |c1|^2 + |c2|^2 <= 1
        let s = (c1.norm_sqr() + c2.norm_sqr()).sqrt().max(1.0);
        let (c1, c2) = (c1 / s, c2 / s);
        let (p1, p2) = (c1.norm_sqr(), c2.norm_sqr());
        let c = concurrence_of(c1, c2);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&c));
        prop_assert!(c <= 2.0 * (p1 * p2).sqrt() + 1e-15);
        prop_assert!(2.0 * (p1 * p2).sqrt() <= p1 + p2 + 1e-15);
    }

    #[test]
    fn far_field_is_non_negative_and_dark_along_the_dipole(
        amps in prop::collection::vec(amplitude(), 1..6),
        seed in prop::collection::vec((-4.0..4.0f64, -4.0..4.0f64, -4.0..4.0f64), 6),
        wavelength in 0.5..3.0f64,
    ) {
        let positions: Vec<[f64; 3]> = seed.iter().take(amps.len()).map(|&(x, y, z)| [x, y, z]).collect();
        let spec = FarFieldSpec::new([0.0, 0.0, 1.0], wavelength, 7, 8).unwrap();
        let f = far_field(&amps, &positions, &spec).unwrap();
        prop_assert!(f.iter().all(|v| *v >= 0.0));
        // first and last elevation rows are the poles +-z
        for j in 0..8 {
            prop_assert!(f[j].abs() < 1e-20);
            prop_assert!(f[6 * 8 + j].abs() < 1e-20);
        }
        prop_assert!((spec.theta[0] + FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn momentum_distribution_obeys_plancherel(sites in state(5 * 5 * 6)) {
        let p = ModelParams::simplified(1.0, 0.4, 0.0, 0.0);
        let lattice = build_finite(&p, &Geometry::cubic(5, 5, 6)).unwrap();
        let nk = momentum_distribution(&lattice, &sites, &MomentumGrid::full_cell(&lattice)).unwrap();
        let total: f64 = sites.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((nk.mean() - total).abs() < 1e-8 * total.max(1.0));
        prop_assert!(nk.values.iter().all(|v| *v >= -1e-12));
    }

    #[test]
    fn bloch_mapping_preserves_the_norm(sites in state(5 * 5 * 4), jp in 0.0..1.0f64, m in -1.0..1.0f64) {
        let p = ModelParams::simplified(1.0, jp, m, 0.0);
        let lattice = build_finite(&p, &Geometry::slab_block(5, 5, 4)).unwrap();
        let spec = SlabSpec::new(p, 5, Sublattice::A).unwrap();
        let map = bloch_map(&lattice, &sites, 0.0, &spec).unwrap();
        let total: f64 = sites.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((map.total() - total).abs() < 1e-10 * total.max(1.0));
    }

    #[test]
    fn exchange_frequency_of_ideal_swaps(j12 in 0.01..0.2f64) {
        let t_end = 3.0 * std::f64::consts::PI / j12;
        let times: Vec<f64> = (0..2001).map(|i| t_end * i as f64 / 2000.0).collect();
        let p1: Vec<f64> = times.iter().map(|t| (j12 * t).cos().powi(2)).collect();
        let p2: Vec<f64> = p1.iter().map(|p| 1.0 - p).collect();
        let e = extract_j12(&times, &p1, &p2, 1e-6).unwrap();
        prop_assert!((e.j12 - j12).abs() < 0.01 * j12, "{} vs {}", e.j12, j12);
        prop_assert!((e.spectral - j12).abs() < 0.05 * j12, "{} vs {}", e.spectral, j12);
    }

    #[test]
    fn phase_classification_matches_the_analytic_conditions(m in -4.0..4.0f64, jp in 0.0..1.5f64) {
        if let Some(want) = analytic_phase(1.0, jp, m, 1e-3) {
            prop_assert_eq!(classify_phase(&ModelParams::simplified(1.0, jp, m, 0.0)).unwrap(), want);
        }
    }

    #[test]
    fn lattice_chern_number_matches_the_closed_form(m in -4.0..4.0f64, jp in 0.0..1.5f64, kz in -3.1..3.1f64) {
        let base = -m - 2.0 * kz.cos();
        let w = 2.0 * SQRT_2 * jp;
        prop_assume!((base + w).abs() > 0.05 && (base - w).abs() > 0.05);
        let (c, _) = chern_reduced_with(&ModelParams::simplified(1.0, jp, m, 0.0), kz, 101).unwrap();
        prop_assert_eq!(c, chern_closed_form(1.0, jp, m, kz));
    }

    #[test]
    fn binary_grids_round_trip_bit_exactly(values in prop::collection::vec(prop::num::f64::ANY, 1..40), complex in any::<bool>()) {
        let grid = if complex {
            let n = values.len() / 2;
            let z: Vec<C64> = (0..n).map(|i| C64::new(values[2 * i], values[2 * i + 1])).collect();
            BinaryGrid::complex(&[n], z).unwrap()
        } else {
            BinaryGrid::real(&[values.len()], values.clone()).unwrap()
        };
        let bytes = grid.encode();
        let back = BinaryGrid::decode(&bytes).unwrap();
        prop_assert_eq!(back.encode(), bytes);
        prop_assert_eq!(back.dims, grid.dims);
    }

    #[test]
    fn columnar_tables_round_trip_bit_exactly(rows in prop::collection::vec(prop::collection::vec(-1e300..1e300f64, 3), 0..20)) {
        let mut t = Columnar::new(&["a", "b", "c"]).meta("note", "round trip");
        for r in &rows {
            t.push(r.clone());
        }
        let back = Columnar::parse(&t.render()).unwrap();
        prop_assert_eq!(back.render(), t.render());
        for (i, name) in ["a", "b", "c"].iter().enumerate() {
            let col = back.column(name).unwrap();
            for (r, v) in rows.iter().zip(col) {
                prop_assert_eq!(r[i].to_bits(), v.to_bits());
            }
        }
    }
}
