//! Property tests for the spectral operators and the nonlinear terms.

use hypervort::field::SpectralField;
use hypervort::lattice::Lattice;
use hypervort::nonlinear::{exact_advection, exact_convolution, PaddedProductPlan, ProductForm};
use hypervort::operators::{biot_savart, curl, fractional_laplacian, galerkin_project, semigroup_apply};
use hypervort::transform::{fft_friendly, min_grid_dealiased, norm_lp, to_physical, to_spectral};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field(n: usize, seed: u64, decay: f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SpectralField::random(Lattice::shared(n).unwrap(), &mut rng, |k| k.powf(-decay))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn trilinear_form_cancels_and_is_antisymmetric(s in any::<u64>()) {
        let mut plan = PaddedProductPlan::new(4).unwrap();
        let u = field(4, s, 1.0);
        let v = field(4, s ^ 0x5555, 1.0);
        let w = field(4, s ^ 0xaaaa, 1.0);
        let scale = u.sobolev_sq(1.0).sqrt() * v.l2_norm() * w.l2_norm();
        let uvv = plan.advect(&u, &v).unwrap().inner(&v);
        let uvw = plan.advect(&u, &v).unwrap().inner(&w);
        let uwv = plan.advect(&u, &w).unwrap().inner(&v);
        prop_assert!(uvv.abs() <= 1e-10 * scale);
        prop_assert!((uvw + uwv).abs() <= 1e-10 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn grid_round_trip_and_parseval(n in 1usize..6, s in any::<u64>()) {
        let f = field(n, s, 1.0);
        let m = fft_friendly(min_grid_dealiased(n));
        let back = to_spectral(&to_physical(&f, m).unwrap(), n).unwrap();
        prop_assert!(back.max_abs_diff(&f) <= 1e-12 * f.max_abs_coeff().max(1.0));
        let l2 = norm_lp(&f, 2.0, m).unwrap();
        prop_assert!((l2 - f.l2_norm()).abs() <= 1e-10 * f.l2_norm());
    }

    #[test]
    fn curl_inverts_biot_savart(n in 1usize..9, s in any::<u64>()) {
        let xi = field(n, s, 0.5);
        prop_assert!(curl(&biot_savart(&xi)).rel_l2_diff(&xi) <= 1e-12);
        prop_assert!(biot_savart(&curl(&xi)).rel_l2_diff(&xi) <= 1e-12);
    }

    #[test]
    fn fft_products_match_direct_convolution(n in 1usize..5, s in any::<u64>()) {
        let xi = field(n, s, 1.0);
        let v = biot_savart(&xi);
        let mut plan = PaddedProductPlan::new(n).unwrap();
        let (t, st) = plan.vorticity_terms(&xi, &v).unwrap();
        // products can vanish identically at small n, so compare on the
        // scale of the factors
        let scale = xi.l2_norm() * xi.l2_norm() * n as f64;
        prop_assert!(t.sub(&exact_convolution(&xi, &v, ProductForm::Transport).unwrap()).l2_norm() <= 1e-10 * scale);
        prop_assert!(st.sub(&exact_convolution(&xi, &v, ProductForm::Stretching).unwrap()).l2_norm() <= 1e-10 * scale);
        let a = field(n, s ^ 7, 1.0);
        let scale = a.l2_norm() * xi.l2_norm() * n as f64;
        prop_assert!(plan.advect(&a, &xi).unwrap().sub(&exact_advection(&a, &xi).unwrap()).l2_norm() <= 1e-10 * scale);
    }

    /// `⟨B₂(ξ, v), φ⟩ = -⟨(ξ·∇)φ, v⟩` for divergence-free `ξ`.
    #[test]
    fn stretching_integrates_by_parts(s in any::<u64>()) {
        let n = 3;
        let mut plan = PaddedProductPlan::new(n).unwrap();
        let xi = field(n, s, 1.0);
        let v = field(n, s ^ 11, 1.0);
        let phi = field(n, s ^ 13, 1.0);
        let (_, b2) = plan.vorticity_terms(&xi, &v).unwrap();
        let lhs = b2.inner(&phi);
        let rhs = -plan.advect(&xi, &phi).unwrap().inner(&v);
        let scale = xi.l2_norm() * v.l2_norm() * phi.sobolev_sq(1.0).sqrt();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
    }

    #[test]
    fn galerkin_projection_contracts(n in 2usize..7, m in 1usize..7, s in any::<u64>()) {
        let f = field(n, s, 0.0);
        let p = galerkin_project(m.min(n), &f).unwrap();
        prop_assert!(p.l2_norm() <= f.l2_norm() * (1.0 + 1e-14));
        let pp = galerkin_project(m.min(n), &p).unwrap();
        prop_assert!(pp.max_abs_diff(&p) == 0.0);
    }

    #[test]
    fn semigroup_is_contractive_and_composes(t1 in 0.0f64..0.5, t2 in 0.0f64..0.5, s in any::<u64>()) {
        let f = field(3, s, 0.5);
        let a = semigroup_apply(t1, 1.0, &semigroup_apply(t2, 1.0, &f).unwrap()).unwrap();
        let b = semigroup_apply(t1 + t2, 1.0, &f).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-14);
        prop_assert!(b.l2_norm() <= f.l2_norm());
        let half = fractional_laplacian(0.5, &fractional_laplacian(0.5, &f));
        prop_assert!(half.rel_l2_diff(&fractional_laplacian(1.0, &f)) <= 1e-13);
    }
}
