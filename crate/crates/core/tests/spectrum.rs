use tcsim_core::device::{DeviceGraph, EdgeCoupling, ModeCoupling, ModeSpec};
use tcsim_core::spectrum::{
    avoided_crossing, exchange_coupling, interaction_profile, straddling, straddling_check, xi_zz,
    EdgeProbe, Manifold, Quantity,
};
use tcsim_core::Error;

fn pair(g_qq: f64, g_qc: f64) -> DeviceGraph {
    DeviceGraph::new(
        vec![
            ModeSpec::transmon("Q1", 5.218, -0.285),
            ModeSpec::coupler("C01", 6.275, -0.250),
            ModeSpec::transmon("Q0", 5.295, -0.275),
        ],
        vec![EdgeCoupling::new("Q1", "Q0", "C01", g_qq, g_qc)],
    )
    .unwrap()
}

/// Reference diagonalisation of the same Hamiltonian written as explicit Kronecker products.
mod oracle {
    use nalgebra::{DMatrix, SymmetricEigen};

    fn embed(op: &DMatrix<f64>, k: usize, dims: &[usize]) -> DMatrix<f64> {
        let mut m = DMatrix::from_element(1, 1, 1.0);
        for (j, &d) in dims.iter().enumerate() {
            let f = if j == k {
                op.clone()
            } else {
                DMatrix::identity(d, d)
            };
            m = m.kronecker(&f);
        }
        m
    }

    pub fn xi_khz(
        f: &[f64],
        alpha: &[f64],
        dims: &[usize],
        couplings: &[(usize, usize, f64)],
        a: usize,
        b: usize,
    ) -> f64 {
        let total: usize = dims.iter().product();
        let mut h = DMatrix::zeros(total, total);
        for k in 0..dims.len() {
            let kerr = DMatrix::from_fn(dims[k], dims[k], |i, j| {
                if i == j {
                    f[k] * i as f64 + 0.5 * alpha[k] * (i * i.saturating_sub(1)) as f64
                } else {
                    0.0
                }
            });
            h += embed(&kerr, k, dims);
        }
        for &(i, j, g) in couplings {
            let x = |d: usize| {
                DMatrix::from_fn(d, d, |r, c| {
                    if r + 1 == c || c + 1 == r {
                        (r.max(c) as f64).sqrt()
                    } else {
                        0.0
                    }
                })
            };
            h += embed(&x(dims[i]), i, dims) * embed(&x(dims[j]), j, dims) * g;
        }
        let eig = SymmetricEigen::new(h);
        let index = |occ: &[usize]| occ.iter().zip(dims).fold(0, |acc, (&o, &d)| acc * d + o);
        let energy = |occ: Vec<usize>| {
            let i = index(&occ);
            let k = (0..total)
                .max_by(|&p, &q| {
                    eig.eigenvectors[(i, p)]
                        .abs()
                        .total_cmp(&eig.eigenvectors[(i, q)].abs())
                })
                .unwrap();
            eig.eigenvalues[k]
        };
        let occ = |na: usize, nb: usize| {
            let mut o = vec![0; dims.len()];
            o[a] = na;
            o[b] = nb;
            o
        };
        (energy(occ(1, 1)) - energy(occ(1, 0)) - energy(occ(0, 1)) + energy(occ(0, 0))) * 1e6
    }
}

#[test]
fn decoupled_pair_has_no_zz() {
    let g = pair(0.0, 1e-12);
    let mut g = g;
    g.edges.clear();
    g.extra_couplings.push(ModeCoupling {
        a: "Q1".into(),
        b: "Q0".into(),
        g: 0.0,
    });
    assert_eq!(xi_zz(&g, &[5.218, 6.0, 5.295], "Q1", "Q0").unwrap(), 0.0);
}

#[test]
fn xi_matches_kronecker_oracle() {
    let couplings = [(0, 2, 0.006), (0, 1, 0.070), (2, 1, 0.070)];
    let alpha = [-0.285, -0.250, -0.275];
    let f = [5.218, 5.9, 5.295];

    // two-level qubits around a three-level coupler, identical truncation on both sides
    let mut g = pair(6.0, 70.0);
    g.modes[0].n_levels = 2;
    g.modes[2].n_levels = 2;
    let ours = xi_zz(&g, &f, "Q1", "Q0").unwrap();
    let same = oracle::xi_khz(&f, &alpha, &[2, 3, 2], &couplings, 0, 2);
    assert!((ours - same).abs() < 0.1, "{ours} vs {same}");

    // four levels per mode against a six-level reference
    let g = pair(6.0, 70.0).with_levels(4);
    let ours = xi_zz(&g, &f, "Q1", "Q0").unwrap();
    let converged = oracle::xi_khz(&f, &alpha, &[6, 6, 6], &couplings, 0, 2);
    assert!((ours - converged).abs() < 0.1, "{ours} vs {converged}");
}

#[test]
fn xi_is_symmetric_under_relabelling() {
    let g = pair(6.0, 70.0);
    let f = [5.218, 5.8, 5.295];
    let ab = xi_zz(&g, &f, "Q1", "Q0").unwrap();
    let ba = xi_zz(&g, &f, "Q0", "Q1").unwrap();
    assert_eq!(ab, ba);
    let swapped = DeviceGraph::new(
        vec![g.modes[2].clone(), g.modes[1].clone(), g.modes[0].clone()],
        vec![EdgeCoupling::new("Q0", "Q1", "C01", 6.0, 70.0)],
    )
    .unwrap();
    let reordered = xi_zz(&swapped, &[5.295, 5.8, 5.218], "Q0", "Q1").unwrap();
    assert!((ab - reordered).abs() < 1e-6 * ab.abs().max(1.0));
}

#[test]
fn direct_coupling_limit_gives_g_qq() {
    let g = pair(6.0, 0.1);
    let c = exchange_coupling(
        &g,
        &[5.218, 6.275, 5.295],
        "Q1",
        "Q0",
        Manifold::OneExcitation,
    )
    .unwrap();
    assert!((c.j - 6.0).abs() / 6.0 < 0.02, "J1 = {}", c.j);
    assert!(c.gap_min <= c.gap_edges.0 && c.gap_min <= c.gap_edges.1);
}

#[test]
fn exchange_needs_a_crossing() {
    let g = pair(6.0, 70.0);
    let n = 3;
    let f = [5.218, 6.0, 5.295];
    let mut la = vec![0; n];
    la[0] = 1;
    let mut lb = vec![0; n];
    lb[2] = 1;
    // window far from resonance: the gap only shrinks toward one edge
    let err = avoided_crossing(&g, &f, &la, &lb, 2, 5.6, 0.05).unwrap_err();
    assert!(matches!(err, Error::NoCrossingInWindow));
}

#[test]
fn straddling_cases() {
    assert!(straddling(5.295, -0.275, 5.218, -0.285));
    assert!(straddling(5.3, -0.275, 5.3, -0.275));
    assert!(!straddling(5.3, -0.275, 4.9, -0.275));
    let dev = DeviceGraph::reference();
    for e in ["C01", "C02", "C03", "C04"] {
        assert!(straddling_check(&dev, e).unwrap());
    }
}

#[test]
fn zero_coupling_profile_is_degenerate() {
    let mut g = pair(0.0, 70.0);
    g.edges[0].g_qc_a = 1e-9;
    g.edges[0].g_qc_b = 1e-9;
    let p = interaction_profile(&g, "C01", (5.7, 6.2), 6).unwrap();
    for q in Quantity::ALL {
        assert!(p.nulls.get(q).degenerate, "{q:?}");
    }
}

#[test]
fn window_outside_arc_is_rejected() {
    let g = pair(6.0, 70.0);
    assert!(matches!(
        interaction_profile(&g, "C01", (5.7, 6.4), 5),
        Err(Error::OutOfArcRange { .. })
    ));
}

#[test]
fn reference_edges_null_structure() {
    let dev = DeviceGraph::reference();
    for edge in ["C01", "C02", "C03", "C04"] {
        let probe = EdgeProbe::new(&dev, edge).unwrap();
        let (_, f_ss) = probe.coupler_range();
        let p = interaction_profile(&dev, edge, (f_ss - 0.65, f_ss), 27).unwrap();
        let n = &p.nulls;
        assert!(n.pairwise_distinct(1e-3));
        let f_hi = probe.subsystem().modes[0]
            .f_sweetspot
            .max(probe.subsystem().modes[2].f_sweetspot);
        let above = n.xi_zz.frequency.unwrap() - f_hi;
        assert!((0.4..1.0).contains(&above), "{edge}: {above}");
        let xi_at_j1 = probe
            .evaluate(Quantity::XiZz, n.j1.frequency.unwrap())
            .unwrap();
        assert!(xi_at_j1.abs() < 100.0, "{edge}: {xi_at_j1}");
        // the J1 null is confirmed independently by gap minimisation
        let j1 = probe
            .evaluate(Quantity::J1, n.j1.frequency.unwrap())
            .unwrap();
        assert!(j1.abs() < 0.05, "{edge}: {j1}");
        for q in Quantity::ALL {
            let curve = match q {
                Quantity::XiZz => &p.xi_zz,
                Quantity::J1 => &p.j1,
                Quantity::J2 => &p.j2,
            };
            let scale = curve.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            for &root in &n.get(q).roots {
                assert!(probe.evaluate(q, root).unwrap().abs() <= 0.01 * scale);
            }
        }
    }
}

/// Two couplers sharing Q0 plus a weak direct capacitance between their pads.
fn coupler_pair(g_cc: f64) -> DeviceGraph {
    let mut g = DeviceGraph::new(
        vec![
            ModeSpec::transmon("Q0", 5.295, -0.275),
            ModeSpec::coupler("C01", 6.275, -0.250),
            ModeSpec::coupler("C02", 6.296, -0.245),
        ],
        vec![],
    )
    .unwrap();
    for (a, b, c) in [
        ("Q0", "C01", 70.0),
        ("Q0", "C02", 70.0),
        ("C01", "C02", g_cc),
    ] {
        g.extra_couplings.push(ModeCoupling {
            a: a.into(),
            b: b.into(),
            g: c,
        });
    }
    g.validate().unwrap();
    g
}

#[test]
fn coupler_coupler_splitting() {
    let f = [5.295, 6.2, 6.2];
    let (c1, c2) = (&[0, 1, 0][..], &[0, 0, 1][..]);
    let mediated = avoided_crossing(&coupler_pair(0.0), &f, c1, c2, 2, 6.2, 0.1).unwrap();
    // second order through Q0, rotating and counter-rotating paths
    let (delta, sigma) = (6.2 - 5.295, 6.2 + 5.295);
    let j2 = 70.0f64.powi(2) * (1.0 / delta - 1.0 / sigma) * 1e-3;
    assert!(
        (mediated.gap_min - 2.0 * j2).abs() < 0.03 * 2.0 * j2,
        "{}",
        mediated.gap_min
    );
    let total = avoided_crossing(&coupler_pair(3.5), &f, c1, c2, 2, 6.2, 0.1).unwrap();
    assert!(
        (total.gap_min - 17.0).abs() < 0.5 * 17.0,
        "{}",
        total.gap_min
    );
    assert!(total.gap_min > mediated.gap_min);
}
