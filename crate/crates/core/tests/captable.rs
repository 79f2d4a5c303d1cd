use std::collections::BTreeMap;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tcsim_core::captable::*;
use tcsim_core::Error;

fn josephson() -> BTreeMap<String, f64> {
    [("Q1", 14.4), ("C12", 21.5), ("Q2", 14.4)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn problem(pair: &SyntheticPair, perturbation: f64) -> DesignProblem {
    let [qi, c, qj] = pair.luts(perturbation, 5);
    DesignProblem::new(qi, c, qj, josephson())
}

fn random_point(lut: &GeometryLUT, rng: &mut ChaCha8Rng) -> Vec<f64> {
    lut.dims
        .iter()
        .map(|d| rng.random_range(d.low..=d.high))
        .collect()
}

fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .filter(|(_, y)| **y != 0.0)
        .map(|(x, y)| ((x - y) / y).abs())
        .fold(0.0, f64::max)
}

fn couplings_of(c: &AssembledCapacitance) -> CouplingStrengths {
    let e = energies_from_capacitance(c, &josephson()).unwrap();
    coupling_strengths(&e, "Q1", "C12", "Q2").unwrap()
}

fn truth_assembled(
    pair: &SyntheticPair,
    xi: &[f64],
    xc: &[f64],
    xj: &[f64],
) -> AssembledCapacitance {
    AssembledCapacitance {
        labels: pair.labels.to_vec(),
        matrix: pair.truth(xi, xc, xj),
        provenance: vec![],
    }
}

#[test]
fn corners_are_reproduced_exactly() {
    let t = SyntheticTransmon::default();
    let lut = t.lut("Q1", "C12", 0.003, 1);
    assert_eq!(lut.n_dims(), 7);
    assert_eq!(lut.corner_capacitances.len(), 128);
    assert_eq!(
        lut.interpolate(&lut.corner_low()).unwrap().matrix,
        lut.corner_capacitances[0]
    );
    assert_eq!(
        lut.interpolate(&lut.corner_high()).unwrap().matrix,
        lut.corner_capacitances[127]
    );
    for k in [5usize, 42, 99] {
        let x: Vec<f64> = lut
            .dims
            .iter()
            .enumerate()
            .map(|(a, d)| if k >> a & 1 == 1 { d.high } else { d.low })
            .collect();
        assert_eq!(
            lut.interpolate(&x).unwrap().matrix,
            lut.corner_capacitances[k]
        );
    }
}

#[test]
fn multilinear_generator_is_reproduced_everywhere() {
    let pair = SyntheticPair::default();
    let [qi, c, _] = pair.luts(0.0, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let x = random_point(&qi, &mut rng);
        assert!(rel_err(&qi.interpolate(&x).unwrap().matrix, &pair.q_i.matrix(&x)) < 1e-12);
        let y = random_point(&c, &mut rng);
        assert!(rel_err(&c.interpolate(&y).unwrap().matrix, &pair.coupler.matrix(&y)) < 1e-12);
    }
}

#[test]
fn perturbed_corners_bound_the_midpoint_error() {
    let t = SyntheticTransmon::default();
    for seed in 0..5 {
        let lut = t.lut("Q1", "C12", 0.003, seed);
        let mid = t.centre();
        let err = rel_err(&lut.interpolate(&mid).unwrap().matrix, &t.matrix(&mid));
        assert!(err <= 0.003, "seed {seed}: {err}");
    }
}

#[test]
fn charging_energy_sweep_stays_within_lut_accuracy() {
    // a bowed "field solver" sampled only at the corners
    let mut pair = SyntheticPair::default();
    pair.q_i.curvature = 0.0025;
    pair.coupler.curvature = 0.0025;
    pair.q_j.curvature = 0.0025;
    let [qi, c, qj] = pair.luts(0.0, 0);
    let (xc, xj) = (pair.coupler.centre(), pair.q_j.centre());
    for k in 0..=10 {
        let mut xi = pair.q_i.centre();
        xi[0] = 300.0 + 12.0 * k as f64;
        let lut = assemble(
            &qi.interpolate(&xi).unwrap(),
            &c.interpolate(&xc).unwrap(),
            &qj.interpolate(&xj).unwrap(),
        )
        .unwrap();
        let e_lut = energies_from_capacitance(&lut, &josephson())
            .unwrap()
            .e_c_of("Q1")
            .unwrap();
        let e_true =
            energies_from_capacitance(&truth_assembled(&pair, &xi, &xc, &xj), &josephson())
                .unwrap()
                .e_c_of("Q1")
                .unwrap();
        assert!(
            ((e_lut - e_true) / e_true).abs() < 0.003,
            "{xi:?}: {e_lut} vs {e_true}"
        );
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let lut = SyntheticTransmon::default().lut("Q1", "C12", 0.003, 2);
    let x = vec![350.0, 20.0, 80.0, 25.0, 120.0, 15.0, 60.0];
    let (_, grad) = lut.interpolate_with_gradient(&x).unwrap();
    for (axis, g) in grad.iter().enumerate() {
        let h = 1e-3;
        let (mut a, mut b) = (x.clone(), x.clone());
        a[axis] -= h;
        b[axis] += h;
        let fd =
            (lut.interpolate(&b).unwrap().matrix - lut.interpolate(&a).unwrap().matrix) / (2.0 * h);
        assert!((fd - g).amax() < 1e-8, "axis {axis}");
    }
}

#[test]
fn out_of_range_names_the_dimension() {
    let lut = SyntheticCoupler::default().lut("C12", ["Q1", "Q2"], 0.0, 0);
    let err = lut.interpolate(&[200.0, 350.0, 5.0]).unwrap_err();
    assert!(
        matches!(err, Error::OutOfRange { ref dim, .. } if dim == "arm_length"),
        "{err}"
    );
    assert!(lut.interpolate(&[200.0, 150.0]).is_err());
}

#[test]
fn assembly_stamps_shared_nodes() {
    let pair = SyntheticPair::default();
    let [qi, c, qj] = pair.luts(0.0, 0);
    let (xi, xc, xj) = (pair.q_i.centre(), pair.coupler.centre(), pair.q_j.centre());
    let a = assemble(
        &qi.interpolate(&xi).unwrap(),
        &c.interpolate(&xc).unwrap(),
        &qj.interpolate(&xj).unwrap(),
    )
    .unwrap();
    assert_eq!(a.labels, ["Q1", "C12", "Q2"]);
    assert_eq!(a.matrix, a.matrix.transpose());
    assert!((a.matrix.clone() - pair.truth(&xi, &xc, &xj)).amax() < 1e-12);
    // qubit-qubit entry comes only from the shared pad
    assert!((a.get("Q1", "Q2").unwrap() + pair.coupler.capacitances(&xc).1).abs() < 1e-15);
    assert_eq!(a.provenance.len(), 3);
}

#[test]
fn decoupled_blocks_give_a_block_diagonal_matrix() {
    let block = |node: &str, c: f64| CapacitanceBlock {
        source: node.into(),
        dims: vec![],
        nodes: vec![node.into()],
        ports: vec![],
        matrix: DMatrix::from_element(1, 1, c),
    };
    let a = assemble(&block("Q1", 70.0), &block("C12", 80.0), &block("Q2", 70.0)).unwrap();
    assert_eq!(
        a.matrix,
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![70.0, 80.0, 70.0]))
    );
    let e = energies_from_capacitance(&a, &josephson()).unwrap();
    assert_eq!(e.e_c_of("Q1").unwrap(), e.e_c_of("Q2").unwrap());
    assert_eq!(e.coupling_between("Q1", "Q2").unwrap(), 0.0);
    assert_eq!(e.coupling_between("C12", "Q2").unwrap(), 0.0);
}

#[test]
fn mismatched_labels_are_rejected() {
    let pair = SyntheticPair::default();
    let [qi, c, qj] = pair.luts(0.0, 0);
    let bi = qi.interpolate(&pair.q_i.centre()).unwrap();
    let bc = c.interpolate(&pair.coupler.centre()).unwrap();
    let bj = qj.interpolate(&pair.q_j.centre()).unwrap();
    let renamed = bj.clone().relabel(&[("C12", "C23")]);
    assert!(matches!(
        assemble(&bi, &bc, &renamed),
        Err(Error::LabelMismatch(_))
    ));
    let twin = bj.relabel(&[("Q2", "Q1")]);
    assert!(matches!(
        assemble(&bi, &bc, &twin),
        Err(Error::LabelMismatch(_))
    ));
}

#[test]
fn seventy_femtofarad_island_has_the_textbook_charging_energy() {
    let a = AssembledCapacitance {
        labels: vec!["Q1".into()],
        matrix: DMatrix::from_element(1, 1, 70.0),
        provenance: vec![],
    };
    let j = [("Q1".to_string(), 14.0)].into_iter().collect();
    let e = energies_from_capacitance(&a, &j).unwrap();
    // e^2 / (2 h C) with C = 70 fF
    let oracle = 1.602176634e-19f64.powi(2) / (2.0 * 6.62607015e-34 * 70e-15) * 1e-9;
    assert!((e.e_c[0] - oracle).abs() < 1e-12);
    assert!((e.e_c[0] - 0.2767).abs() < 5e-4);
}

#[test]
fn singular_and_incomplete_inputs() {
    let singular = AssembledCapacitance {
        labels: vec!["Q1".into(), "Q2".into()],
        matrix: DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]),
        provenance: vec![],
    };
    let j: BTreeMap<String, f64> = [("Q1".to_string(), 14.0), ("Q2".to_string(), 14.0)]
        .into_iter()
        .collect();
    assert!(matches!(
        energies_from_capacitance(&singular, &j),
        Err(Error::SingularMatrix)
    ));
    let fine = AssembledCapacitance {
        matrix: DMatrix::identity(2, 2) * 70.0,
        ..singular
    };
    let partial: BTreeMap<String, f64> = [("Q1".to_string(), 14.0)].into_iter().collect();
    assert!(matches!(
        energies_from_capacitance(&fine, &partial),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn inverted_coupling_energy_returns_six_megahertz() {
    // transmon at 5.3 GHz with E_C = 0.275 GHz
    let (ec, ej) = (0.275, (5.3f64 + 0.275).powi(2) / (8.0 * 0.275));
    let r = ej / ec;
    let e_ij = 6e-3 * std::f64::consts::SQRT_2 / r.sqrt();
    assert!((1e3 * exchange_coupling(e_ij, r, r) - 6.0).abs() < 1e-12);
}

#[test]
fn design_search_reaches_the_coupling_targets() {
    let p = problem(&SyntheticPair::default(), 0.003);
    let targets = DesignTargets {
        g_qq: 6.0,
        g_qc: 70.0,
        e_c: None,
    };
    let d = design_search(&targets, &p).unwrap();
    assert!(d.max_residual() <= 0.01, "{:?}", d.residuals);
    assert!(d.iterations < 200);
    assert!((d.couplings.g_qq - 6.0).abs() < 0.06 && (d.couplings.g_qc_i - 70.0).abs() < 0.7);

    // the returned geometry reproduces the couplings through the public chain
    let blocks = [
        p.q_i.interpolate(&d.dims_i).unwrap(),
        p.coupler.interpolate(&d.dims_c).unwrap(),
        p.q_j.interpolate(&d.dims_j).unwrap(),
    ];
    let g = couplings_of(&assemble(&blocks[0], &blocks[1], &blocks[2]).unwrap());
    assert!((g.g_qq - d.couplings.g_qq).abs() < 1e-9);
}

#[test]
fn design_search_with_a_charging_energy_target() {
    let p = problem(&SyntheticPair::default(), 0.0);
    let targets = DesignTargets {
        g_qq: 6.0,
        g_qc: 70.0,
        e_c: Some(0.27),
    };
    let d = design_search(&targets, &p).unwrap();
    assert!(d.max_residual() <= 0.01, "{:?}", d.residuals);
    assert!((d.e_c_i - 0.27).abs() < 0.0027);
}

#[test]
fn design_search_fixed_point() {
    let pair = SyntheticPair::default();
    let p = problem(&pair, 0.0);
    let (xi, xc, xj) = (
        vec![330.0, 15.0, 70.0, 20.0, 90.0, 30.0, 60.0],
        vec![260.0, 150.0, 12.0],
        pair.q_j.centre(),
    );
    let g = couplings_of(&truth_assembled(&pair, &xi, &xc, &xj));
    // both coupler couplings are driven to the q_i value of the reference geometry
    let targets = DesignTargets {
        g_qq: g.g_qq,
        g_qc: g.g_qc_i,
        e_c: None,
    };
    let d = design_search(&targets, &p).unwrap();
    assert!((d.couplings.g_qq - g.g_qq).abs() / g.g_qq <= 0.01);
    assert!((d.couplings.g_qc_i - g.g_qc_i).abs() / g.g_qc_i <= 0.01);
}

#[test]
fn unattainable_targets_are_unreachable() {
    let p = problem(&SyntheticPair::default(), 0.0);
    for targets in [
        DesignTargets {
            g_qq: 60.0,
            g_qc: 70.0,
            e_c: None,
        },
        DesignTargets {
            g_qq: 6.0,
            g_qc: 400.0,
            e_c: None,
        },
    ] {
        assert!(matches!(
            design_search(&targets, &p),
            Err(Error::Unreachable { .. })
        ));
    }
}

#[test]
fn unaccounted_pad_capacitance_stays_within_the_assembly_budget() {
    let pair = SyntheticPair {
        unaccounted: 0.04,
        ..Default::default()
    };
    let [qi, c, qj] = pair.luts(0.0, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let (xi, xc, xj) = (
            random_point(&qi, &mut rng),
            random_point(&c, &mut rng),
            random_point(&qj, &mut rng),
        );
        let lut = assemble(
            &qi.interpolate(&xi).unwrap(),
            &c.interpolate(&xc).unwrap(),
            &qj.interpolate(&xj).unwrap(),
        )
        .unwrap();
        let truth = truth_assembled(&pair, &xi, &xc, &xj);
        for (a, b) in [("Q1", "C12"), ("Q2", "C12")] {
            let (x, y) = (lut.get(a, b).unwrap(), truth.get(a, b).unwrap());
            assert!(((x - y) / y).abs() <= 0.05);
        }
        let (g, t) = (couplings_of(&lut), couplings_of(&truth));
        assert!(((g.g_qc_i - t.g_qc_i) / t.g_qc_i).abs() <= 0.05);
        assert!(((g.g_qq - t.g_qq) / t.g_qq).abs() <= 0.08);
    }
}

#[test]
fn lut_files_round_trip() {
    let lut = SyntheticCoupler::default().lut("C12", ["Q1", "Q2"], 0.003, 4);
    let text = lut.to_toml_string();
    let back = GeometryLUT::from_toml_str(&text, "coupler.toml").unwrap();
    assert_eq!(back, lut);
    let clean = SyntheticCoupler::default().lut("C12", ["Q1", "Q2"], 0.0, 4);
    assert!(clean.dominance_warnings().is_empty());
}

#[test]
fn lut_files_are_checked() {
    let lut = SyntheticCoupler::default().lut("C12", ["Q1", "Q2"], 0.0, 4);
    let text = lut.to_toml_string();
    // drop the last corner
    let cut = text.rfind("[[corner]]").unwrap();
    let err = GeometryLUT::from_toml_str(&text[..cut], "c.toml").unwrap_err();
    assert!(matches!(err, Error::Validation { .. }), "{err}");

    let mut asym = lut.clone();
    asym.corner_capacitances[3][(0, 1)] = 0.5;
    let err = GeometryLUT::from_toml_str(&asym.to_toml_string(), "c.toml").unwrap_err();
    assert!(err.to_string().contains("symmetric"), "{err}");
}

#[test]
fn weak_diagonals_are_reported() {
    let mut lut = SyntheticTransmon::default().lut("Q1", "C12", 0.0, 0);
    lut.corner_capacitances[0][(1, 1)] = 0.1;
    assert_eq!(lut.dominance_warnings().len(), 1);
    assert!(lut.validate().is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn interpolation_is_linear_along_each_axis(axis in 0usize..7, seed: u64, t in 0.0..1.0f64) {
        let lut = SyntheticTransmon::default().lut("Q1", "C12", 0.003, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_point(&lut, &mut rng);
        let d = &lut.dims[axis];
        let (mut a, mut b, mut m) = (x.clone(), x.clone(), x);
        a[axis] = d.low;
        b[axis] = d.high;
        m[axis] = d.low + t * (d.high - d.low);
        let ca = lut.interpolate(&a).unwrap().matrix;
        let cb = lut.interpolate(&b).unwrap().matrix;
        let cm = lut.interpolate(&m).unwrap().matrix;
        let line = &ca * (1.0 - t) + &cb * t;
        prop_assert!((cm - line).amax() < 1e-12 * ca.amax());
    }

    #[test]
    fn assembled_matrices_are_symmetric(seed: u64) {
        let pair = SyntheticPair::default();
        let [qi, c, qj] = pair.luts(0.003, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = assemble(
            &qi.interpolate(&random_point(&qi, &mut rng)).unwrap(),
            &c.interpolate(&random_point(&c, &mut rng)).unwrap(),
            &qj.interpolate(&random_point(&qj, &mut rng)).unwrap(),
        ).unwrap();
        prop_assert_eq!(&a.matrix, &a.matrix.transpose());
        prop_assert!((0..3).all(|i| a.matrix[(i, i)] > 0.0));
    }

    #[test]
    fn exchange_scales_with_the_coupling_energy(e in 0.0..0.05f64, lambda in 0.0..10.0f64, ra in 10.0..200.0f64, rb in 10.0..200.0f64) {
        let g = exchange_coupling(e, ra, rb);
        prop_assert!((exchange_coupling(lambda * e, ra, rb) - lambda * g).abs() <= 1e-15 * (1.0 + lambda * g.abs()));
    }
}
