//! Generators, Matrix Market files and experiment configs.

use nalgebra::DMatrix;
use proptest::prelude::*;
use sketch_krylov::bench::{
    format_array, format_coordinate, gen_laplacian, gen_synthetic, laplacian_eigenvalues, parse_matrix_market, Experiment,
    ExperimentConfig, MatrixSource, Method, MtxMatrix, SketchSpec,
};
use sketch_krylov::kernels::{cond_estimate, householder_r};
use sketch_krylov::krylov::{rayleigh_ritz, CsrMatrix};
use sketch_krylov::{
    ClassicInterblock, Interblock, LsSolver, Matrix, PrecisionMode, RbgsConfig, SketchKind, SketchOperator,
};

fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_column_slice(m.rows(), m.cols(), m.data())
}

#[test]
fn synthetic_entries_match_formula() {
    let (n, m) = (300, 17);
    let w = gen_synthetic(n, m).unwrap();
    for (i, j) in [(0, 0), (5, 3), (299, 16), (150, 8)] {
        let (x, mu) = ((i + 1) as f64 / n as f64, (j + 1) as f64 / m as f64);
        let f = (10.0 * (mu + x)).sin() / ((100.0 * (mu - x)).cos() + 1.1);
        assert_eq!(w[(i, j)], f);
    }
}

#[test]
fn synthetic_desk_scale_corners() {
    let w = gen_synthetic(32768, 150).unwrap();
    assert!((w[(0, 0)] - 0.03545016839925498).abs() <= 1e-15);
    assert!((w[(32767, 149)] - 0.43473583367982266).abs() <= 1e-15);
}

#[test]
fn synthetic_condition_sweep() {
    // cond(W_(1:10i)) at 32768 x 150, from an independent SVD
    let expected = [
        5.829973e+00,
        2.103385e+01,
        4.789881e+01,
        2.540864e+02,
        7.425161e+02,
        3.642557e+03,
        5.710532e+03,
        2.515800e+04,
        3.560321e+04,
        2.560553e+05,
        3.793198e+05,
        1.598552e+06,
        1.849930e+06,
        2.611430e+07,
        3.800909e+07,
    ];
    let w = gen_synthetic(32768, 150).unwrap();
    let r = householder_r(&w).unwrap();
    for (i, &e) in expected.iter().enumerate() {
        let k = 10 * (i + 1);
        let c = cond_estimate(&r.block(0..k, 0..k)).unwrap();
        assert!((c - e).abs() <= 1e-5 * e, "block {}: {c} vs {e}", i + 1);
    }
}

#[test]
fn synthetic_cond_matches_nalgebra() {
    let w = gen_synthetic(2048, 40).unwrap();
    let sv = to_na(&w).singular_values();
    let oracle = sv.max() / sv.min();
    let c = cond_estimate(&w).unwrap();
    assert!((c - oracle).abs() <= 1e-6 * oracle, "{c} vs {oracle}");
}

#[test]
fn laplacian_spectrum_matches_dense_eigensolver() {
    for (grid, shift) in [(vec![7], 0.0), (vec![6, 5], 0.3), (vec![3, 4, 2], -0.1)] {
        let a = gen_laplacian(&grid, shift).unwrap();
        let mut oracle: Vec<f64> = to_na(&a.to_dense()).symmetric_eigen().eigenvalues.iter().copied().collect();
        oracle.sort_by(|x, y| y.total_cmp(x));
        let closed = laplacian_eigenvalues(&grid, shift);
        assert_eq!(closed.len(), oracle.len());
        for (c, o) in closed.iter().zip(&oracle) {
            assert!((c - o).abs() <= 1e-12, "{grid:?}: {c} vs {o}");
        }
    }
}

#[test]
fn laplacian_top_eigenvalue_by_rayleigh_ritz() {
    let grid = [30, 30];
    let a = gen_laplacian(&grid, 0.0).unwrap();
    let n = a.rows();
    let top = laplacian_eigenvalues(&grid, 0.0)[0];
    let h = std::f64::consts::PI * 30.0 / (2.0 * 31.0);
    assert!((top - 8.0 * h.sin().powi(2)).abs() <= 1e-13);
    let b = Matrix::from_fn(n, 4, |i, j| ((i * (j + 3)) % 13) as f64 - 6.0);
    let theta = SketchOperator::new(SketchKind::Srht, 300, n, 2).unwrap();
    let res = rayleigh_ritz(&a, &b, &theta, 15, 8, &RbgsConfig::new(4, PrecisionMode::UniqueFine)).unwrap();
    let rel = (res.values[0].re - top).abs() / top;
    assert!(rel <= 1e-10, "{} vs {top}: {rel:e}", res.values[0].re);
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        -1e3..1e3f64,
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE / 8.0),
    ]
}

fn dense(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(finite(), r * c).prop_map(move |d| Matrix::from_col_major(r, c, d).unwrap())
    })
}

fn bits(m: &Matrix) -> Vec<u64> {
    m.data().iter().map(|x| x.to_bits()).collect()
}

proptest! {
    #[test]
    fn array_round_trip_is_bit_exact(m in dense(8)) {
        let back = parse_matrix_market(&format_array(&m)).unwrap();
        let MtxMatrix::Dense(back) = back else { panic!("array file read back as sparse") };
        prop_assert_eq!(back.shape(), m.shape());
        prop_assert_eq!(bits(&back), bits(&m));
    }

    #[test]
    fn coordinate_round_trip_is_bit_exact(
        (rows, cols, entries) in (1usize..12, 1usize..12).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), prop::collection::btree_map((0..r, 0..c), finite().prop_filter("nonzero", |x| *x != 0.0), 0..20))
        })
    ) {
        let triplets: Vec<(usize, usize, f64)> = entries.iter().map(|(&(i, j), &v)| (i, j, v)).collect();
        let a = CsrMatrix::from_triplets(rows, cols, &triplets).unwrap();
        let back = parse_matrix_market(&format_coordinate(&a)).unwrap();
        prop_assert_eq!(back.shape(), (rows, cols));
        prop_assert_eq!(bits(&back.to_dense()), bits(&a.to_dense()));
    }
}

fn solver() -> impl Strategy<Value = LsSolver> {
    prop_oneof![
        (1usize..20).prop_map(LsSolver::Richardson),
        (1usize..20).prop_map(LsSolver::BmgsReorth),
        (1usize..50).prop_map(LsSolver::CgNormal),
        Just(LsSolver::HouseholderDirect),
    ]
}

fn source() -> impl Strategy<Value = MatrixSource> {
    prop_oneof![
        (2usize..100_000, 2usize..500).prop_map(|(n, m)| MatrixSource::Synthetic { n, m }),
        (prop::collection::vec(2usize..300, 1..4), -10.0..1e3f64)
            .prop_map(|(grid, shift)| MatrixSource::Laplacian { grid, shift }),
        "[a-z0-9_/]{1,20}\\.mtx".prop_map(|p| MatrixSource::File(p.into())),
    ]
}

fn config() -> impl Strategy<Value = ExperimentConfig> {
    (
        (
            prop_oneof![Just(Experiment::QrSynthetic), Just(Experiment::CustomQr), Just(Experiment::Gmres), Just(Experiment::Eig)],
            source(),
            prop_oneof![Just(Method::Bcgs), Just(Method::Bmgs), Just(Method::Bcgs2), Just(Method::Rbgs), Just(Method::Subspace)],
            (
                prop_oneof![Just(SketchKind::Rademacher), Just(SketchKind::Srht), Just(SketchKind::Identity)],
                1usize..5000,
                prop::option::of(any::<u64>()),
            ),
            1usize..64,
            prop_oneof![Just(PrecisionMode::Multi), Just(PrecisionMode::UniqueCoarse), Just(PrecisionMode::UniqueFine)],
            solver(),
        ),
        (
            prop_oneof![Just(Interblock::RgsSingle), (1usize..5).prop_map(Interblock::SketchedCholqr), Just(Interblock::L2PlusCholqr)],
            prop_oneof![Just(ClassicInterblock::Householder), Just(ClassicInterblock::Cgs2), Just(ClassicInterblock::Cholqr)],
            (2usize..40, 0usize..20, 1usize..20),
            prop::option::of(1e-16..1.0f64),
            any::<bool>(),
            any::<bool>(),
            prop::option::of("[a-z0-9_/]{1,16}"),
        ),
    )
        .prop_map(|((experiment, matrix, method, (kind, k, seed), block, precision, solver), rest)| {
            let (interblock, classic_interblock, (krylov_order, restarts, iterations), tol, gate, save_factors, out) = rest;
            ExperimentConfig {
                experiment,
                matrix,
                method,
                sketch: SketchSpec { kind, k, seed },
                block,
                precision,
                solver,
                interblock,
                classic_interblock,
                krylov_order,
                restarts,
                iterations,
                tol,
                gate,
                save_factors,
                out: out.map(Into::into),
            }
        })
}

proptest! {
    #[test]
    fn config_round_trip(cfg in config()) {
        let text = cfg.serialize();
        let back = ExperimentConfig::parse(&text, Experiment::Gmres).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn config_errors_carry_line_numbers() {
    let err = ExperimentConfig::parse("method=rbgs\n\n# note\nblock=ten\n", Experiment::Gmres).unwrap_err();
    assert!(err.to_string().contains("line 4"), "{err}");
    let err = ExperimentConfig::parse("nonsense\n", Experiment::Gmres).unwrap_err();
    assert!(err.to_string().contains("line 1"), "{err}");
}
