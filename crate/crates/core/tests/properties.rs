//! Property tests for the identities the toolkit relies on, over randomly
//! drawn limit-circle models, points and vectors.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use lc_jacobi::extensions::Secular;
use lc_jacobi::polynomials::eval_pq_real;
use lc_jacobi::quasiresolvent::lemma_residuals;
use lc_jacobi::prelude::*;
use proptest::prelude::*;

fn power(p: f64, shift: u32) -> CoefficientModel {
    CoefficientModel::power(p, shift).unwrap()
}

/// Limit-circle coefficient models: power laws with and without a constant
/// `β`, and geometric growth.
fn lc_model() -> impl Strategy<Value = CoefficientModel> {
    prop_oneof![
        (2.0f64..3.0, 1u32..4).prop_map(|(p, s)| power(p, s)),
        (1.5f64..3.0).prop_map(|x| CoefficientModel::geometric(x).unwrap()),
        (2.0f64..3.0, -0.9f64..0.9)
            .prop_map(|(p, beta)| power(p, 1).with_diagonal(Diagonal::ConstantBeta(beta)).unwrap()),
    ]
}

fn point(radius: f64) -> impl Strategy<Value = Complex64> {
    (-radius..radius, -radius..radius).prop_map(|(re, im)| c64(re, im))
}

/// A point with `|Im z| ≥ 0.1`.
fn off_axis() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, 0.1f64..3.0, any::<bool>()).prop_map(|(re, im, up)| c64(re, if up { im } else { -im }))
}

fn vector(max_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(point(1.0), 1..=max_len)
}

fn extension() -> impl Strategy<Value = ExtensionParamT> {
    prop_oneof![
        4 => (-5.0f64..5.0).prop_map(ExtensionParamT::Finite),
        1 => Just(ExtensionParamT::Infinite),
    ]
}

/// `Σ x_n conj(y_n)` over the common length.
fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(x, y)| x * y.conj()).sum()
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn is_geometric(model: &CoefficientModel) -> bool {
    matches!(model.off_diagonal(), OffDiagonal::Geometric { .. })
}

proptest! {
    #[test]
    fn k_alpha_relation(model in lc_model()) {
        let top = 200.min(model.safe_extent() - 2);
        for n in 1..top {
            let lhs = model.k(n).unwrap() * model.alpha(n);
            let rhs = model.alpha(n - 1);
            prop_assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * rhs, "n = {n}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn zero_diagonal_phase_is_exact(p in 2.0f64..3.0, shift in 1u32..4) {
        let model = power(p, shift);
        for n in 0..500 {
            prop_assert_eq!(model.beta(n), 0.0);
            prop_assert_eq!(model.phi(n), n as f64 * FRAC_PI_2);
        }
    }

    #[test]
    fn phase_increments_are_theta(model in lc_model()) {
        let top = 300.min(model.safe_extent() - 2);
        for n in 0..top {
            if let Some(theta) = model.theta(n) {
                let (lo, hi) = model.phi_pair(n);
                prop_assert!(((hi - lo) - theta).abs() <= 8.0 * f64::EPSILON * hi.abs().max(1.0));
            }
        }
    }

    #[test]
    fn classification_is_deterministic(model in lc_model()) {
        let horizon = 2000.min(model.safe_extent() - 2);
        prop_assert_eq!(classify(&model, horizon, 1e-3).unwrap(), classify(&model, horizon, 1e-3).unwrap());
    }

    #[test]
    fn wronskian_is_constant(model in lc_model(), z in point(3.0)) {
        let n = 500.min(model.safe_extent() - 2);
        let table = eval_pq(&model, z, n).unwrap();
        prop_assert!(table.wronskian_deviation(&model) < 1e-10);
    }

    #[test]
    fn p_n_has_degree_n(model in lc_model(), x0 in -2.0f64..2.0, h in 0.05f64..0.5) {
        // The (n+1)-th finite difference of a degree-n polynomial vanishes.
        for n in 0..8usize {
            let values: Vec<f64> = (0..=n + 1)
                .map(|j| eval_pq_real(&model, x0 + j as f64 * h, n + 1).unwrap().0[n])
                .collect();
            let mut diff = 0.0;
            let mut scale = 0.0;
            let mut binom = 1.0;
            for (j, v) in values.iter().enumerate() {
                let sign = if (n + 1 - j) % 2 == 0 { 1.0 } else { -1.0 };
                diff += sign * binom * v;
                scale += binom * v.abs();
                binom = binom * (n + 1 - j) as f64 / (j + 1) as f64;
            }
            prop_assert!(diff.abs() <= 1e-9 * scale.max(f64::MIN_POSITIVE), "n = {n}: {diff} of {scale}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reproducing_identity(model in lc_model(), z in off_axis(), h in vector(30)) {
        let model = LcModel::new(model).unwrap();
        let n = 200.min(model.model().safe_extent() - 2);
        let r = QuasiResolvent::new(&model, z, n).unwrap();
        // Geometric growth makes the terms of each row huge; compare against them.
        let residual = if is_geometric(model.model()) {
            r.scaled_residual(&h).unwrap()
        } else {
            r.residual(&h).unwrap()
        };
        prop_assert!(residual < 1e-8, "{residual}");
    }

    #[test]
    fn adjoint_relation(model in lc_model(), z in off_axis(), h in vector(30), g in vector(30)) {
        let model = LcModel::new(model).unwrap();
        let n = 120.min(model.model().safe_extent() - 2);
        let rz = QuasiResolvent::new(&model, z, n).unwrap();
        let rzbar = QuasiResolvent::new(&model, z.conj(), n).unwrap();
        let lhs = inner(&rz.apply(&h, Support::Finite).unwrap(), &g);
        let rhs = inner(&h, &rzbar.apply(&g, Support::Finite).unwrap());
        let scale = lhs.norm().max(rhs.norm()).max(1e-300);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn tilt_adds_rank_one_term(model in lc_model(), z in off_axis(), h in vector(30), imaginary in any::<bool>()) {
        let c = if imaginary { Complex64::i() } else { c64(1.0, 0.0) };
        let model = LcModel::new(model).unwrap();
        let n = 120.min(model.model().safe_extent() - 2);
        let r = QuasiResolvent::new(&model, z, n).unwrap();
        let tilted = r.with_tilt(c);
        let base = r.apply(&h, Support::Finite).unwrap();
        let moved = tilted.apply(&h, Support::Finite).unwrap();
        // ⟨h, p(z̄)⟩ = Σ h_m p_m(z).
        let weight: Complex64 = h.iter().zip(r.p()).map(|(h, p)| h * p).sum();
        let expected: Vec<Complex64> = base.iter().zip(r.p()).map(|(b, p)| b + c * weight * p).collect();
        let gap: Vec<Complex64> = moved.iter().zip(&expected).map(|(m, e)| m - e).collect();
        prop_assert!(norm(&gap) <= 1e-10 * norm(&expected).max(1e-300));
        let residual = if is_geometric(model.model()) {
            tilted.scaled_residual(&h).unwrap()
        } else {
            tilted.residual(&h).unwrap()
        };
        prop_assert!(residual < 1e-8, "{residual}");
    }

    #[test]
    fn herglotz_and_conjugation(z in off_axis(), t in extension()) {
        let model = model_a();
        let g = gamma_t(model, z, t, 1e-8).unwrap();
        let g_bar = gamma_t(model, z.conj(), t, 1e-8).unwrap();
        prop_assert!(g.im * z.im > 0.0, "γ = {g} at z = {z}");
        prop_assert!((g_bar - g.conj()).norm() <= 1e-10 * g.norm().max(1.0));
    }

    #[test]
    fn resolvent_is_symmetric(z in off_axis(), t in extension(), h in vector(20), g in vector(20)) {
        let model = model_a();
        let n = 100;
        let lhs = inner(&resolvent_apply(model, z, t, &h, n, 1e-8).unwrap(), &g);
        let rhs = inner(&h, &resolvent_apply(model, z.conj(), t, &g, n, 1e-8).unwrap());
        prop_assert!((lhs - rhs).norm() <= 1e-8 * lhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn omega_has_unit_modulus(chi in -10.0f64..10.0, r in 0.5f64..2.0) {
        let w = Complex64::from_polar(1.0, chi);
        let omega = ExtensionParamOmega::new(w).unwrap();
        prop_assert!((omega.omega().norm() - 1.0).abs() <= 2.0 * f64::EPSILON);
        prop_assume!((r - 1.0).abs() > 1e-9);
        prop_assert!(ExtensionParamOmega::new(w * r).is_err());
    }

    #[test]
    fn extension_parameter_round_trips(t in extension()) {
        let parsed: ExtensionParamT = t.to_string().parse().unwrap();
        prop_assert_eq!(parsed, t);
    }
}

fn model_a() -> &'static LcModel {
    static MODEL: OnceLock<LcModel> = OnceLock::new();
    MODEL.get_or_init(|| LcModel::new(power(2.0, 1)).unwrap())
}

fn test_models() -> &'static [LcModel] {
    static MODELS: OnceLock<Vec<LcModel>> = OnceLock::new();
    MODELS.get_or_init(|| {
        vec![
            LcModel::new(power(2.0, 1)).unwrap(),
            LcModel::new(CoefficientModel::geometric(2.0).unwrap()).unwrap(),
            LcModel::new(power(2.0, 1).with_diagonal(Diagonal::ConstantBeta(0.5)).unwrap()).unwrap(),
        ]
    })
}

fn boundary_maps() -> &'static [BoundaryMap<'static>] {
    static MAPS: OnceLock<Vec<BoundaryMap<'static>>> = OnceLock::new();
    MAPS.get_or_init(|| {
        test_models()
            .iter()
            .map(|m| BoundaryMap::new(m, c64(0.0, 0.0), &JostConfig::default()).unwrap())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lemma_links_z_and_zero(which in 0usize..3, z in point(2.0)) {
        let (res_p, res_q) = lemma_residuals(&test_models()[which], z, 200).unwrap();
        prop_assert!(res_p < 1e-6 && res_q < 1e-6, "{res_p}, {res_q}");
    }

    #[test]
    fn finite_vectors_have_no_boundary_values(which in 0usize..3, u in vector(60)) {
        let s = boundary_maps()[which].apply(&u, Support::Finite).unwrap();
        prop_assert!(s.s_plus.norm() < 1e-8 && s.s_minus.norm() < 1e-8);
    }

    #[test]
    fn jost_wronskian_is_constant(which in 0usize..3, z in point(1.5)) {
        let jost = jost_solutions(&test_models()[which], z, &JostConfig::default()).unwrap();
        prop_assert!(jost.wronskian_deviation < 1e-6, "{}", jost.wronskian_deviation);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn eigenvalues_are_genuine_poles(t in extension()) {
        let model = model_a();
        let cfg = SpectralConfig::default().with_window(-10.0, 10.0);
        let measure = spectral_measure(model, t, &cfg).unwrap();
        prop_assert!(!measure.atoms.is_empty());
        for atom in &measure.atoms {
            prop_assert!(atom.residual < 1e-8, "|D| = {} at {}", atom.residual, atom.lambda);
            prop_assert!(atom.numerator > 1e-8, "|N| = {} at {}", atom.numerator, atom.lambda);
        }
    }
}

#[test]
fn root_count_is_stable_under_grid_refinement() {
    let model = model_a();
    for t in [ExtensionParamT::Finite(0.0), ExtensionParamT::Finite(1.0), ExtensionParamT::Infinite] {
        let coarse = eigenvalues(model, t, &SpectralConfig::default()).unwrap();
        let fine = eigenvalues(model, t, &SpectralConfig { grid: 0.025, ..SpectralConfig::default() }).unwrap();
        assert_eq!(coarse.eigenvalues.len(), fine.eigenvalues.len(), "t = {t}");
        for (a, b) in coarse.eigenvalues.iter().zip(&fine.eigenvalues) {
            assert!((a - b).abs() < 1e-8, "t = {t}: {a} vs {b}");
        }
    }
}

#[test]
fn secular_denominator_vanishes_at_eigenvalues() {
    let model = model_a();
    let t = ExtensionParamT::Finite(0.0);
    let spectrum = eigenvalues(model, t, &SpectralConfig::default().with_window(-5.0, 5.0)).unwrap();
    let secular = Secular::new(model, t, 16384).unwrap();
    for &x in &spectrum.eigenvalues {
        let (num, den) = secular.at(x).unwrap();
        assert!(den.abs() < 1e-6 && num.abs() > 1e-6, "at {x}: N = {num}, D = {den}");
    }
}
