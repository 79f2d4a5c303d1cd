use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    assemble, coupling_strengths, energies_from_capacitance, CapacitanceBlock, CouplingStrengths,
    GeometryLUT,
};
use crate::{Error, Result};

/// Coupling targets of one tunable-coupler unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignTargets {
    /// MHz.
    pub g_qq: f64,
    /// MHz, for both qubits.
    pub g_qc: f64,
    /// Qubit charging energy, GHz, for both qubits.
    #[serde(default)]
    pub e_c: Option<f64>,
}

/// Three single-island LUTs and the Josephson energies of their islands.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignProblem {
    pub q_i: GeometryLUT,
    pub coupler: GeometryLUT,
    pub q_j: GeometryLUT,
    /// GHz per node label.
    pub josephson: BTreeMap<String, f64>,
    pub max_iterations: usize,
    /// Largest accepted relative residual.
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignResult {
    pub dims_i: Vec<f64>,
    pub dims_c: Vec<f64>,
    pub dims_j: Vec<f64>,
    pub couplings: CouplingStrengths,
    /// GHz.
    pub e_c_i: f64,
    pub e_c_j: f64,
    /// Relative residual per targeted quantity.
    pub residuals: Vec<(String, f64)>,
    pub iterations: usize,
}

impl DesignResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1.abs()).fold(0.0, f64::max)
    }
}

struct Forward {
    g: CouplingStrengths,
    e_c: (f64, f64),
}

impl DesignProblem {
    pub fn new(
        q_i: GeometryLUT,
        coupler: GeometryLUT,
        q_j: GeometryLUT,
        josephson: BTreeMap<String, f64>,
    ) -> Self {
        DesignProblem {
            q_i,
            coupler,
            q_j,
            josephson,
            max_iterations: 200,
            tolerance: 1e-4,
        }
    }

    fn luts(&self) -> [&GeometryLUT; 3] {
        [&self.q_i, &self.coupler, &self.q_j]
    }

    fn labels(&self) -> Result<[&str; 3]> {
        let mut out = [""; 3];
        for (o, l) in out.iter_mut().zip(self.luts()) {
            l.validate()?;
            match l.nodes.as_slice() {
                [node] => *o = node,
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "{}: design needs one island node per element",
                        l.name
                    )))
                }
            }
        }
        Ok(out)
    }

    fn n_dims(&self) -> usize {
        self.luts().iter().map(|l| l.n_dims()).sum()
    }

    /// Dimension values from normalised coordinates, split per element.
    fn split(&self, u: &[f64]) -> [Vec<f64>; 3] {
        let mut at = 0;
        self.luts().map(|l| {
            let x = l
                .dims
                .iter()
                .zip(&u[at..])
                .map(|(d, &t)| d.low + t * (d.high - d.low))
                .collect();
            at += l.n_dims();
            x
        })
    }

    fn evaluate(&self, blocks: [CapacitanceBlock; 3], labels: [&str; 3]) -> Result<Forward> {
        let c = assemble(&blocks[0], &blocks[1], &blocks[2])?;
        let e = energies_from_capacitance(&c, &self.josephson)?;
        Ok(Forward {
            g: coupling_strengths(&e, labels[0], labels[1], labels[2])?,
            e_c: (e.e_c_of(labels[0])?, e.e_c_of(labels[2])?),
        })
    }

    fn forward(&self, u: &[f64], labels: [&str; 3]) -> Result<Forward> {
        let x = self.split(u);
        let luts = self.luts();
        let blocks = [
            luts[0].interpolate(&x[0])?,
            luts[1].interpolate(&x[1])?,
            luts[2].interpolate(&x[2])?,
        ];
        self.evaluate(blocks, labels)
    }

    /// Forward map at corner `k` of the combined box, straight from the stored matrices.
    fn corner(&self, k: usize, labels: [&str; 3]) -> Result<Forward> {
        let mut shift = 0;
        let blocks = self.luts().map(|l| {
            let idx = (k >> shift) & ((1 << l.n_dims()) - 1);
            shift += l.n_dims();
            CapacitanceBlock {
                source: l.name.clone(),
                dims: Vec::new(),
                nodes: l.nodes.clone(),
                ports: l.ports.clone(),
                matrix: l.corner_capacitances[idx].clone(),
            }
        });
        self.evaluate(blocks, labels)
    }
}

fn quantities(f: &Forward, t: &DesignTargets) -> Vec<(&'static str, f64, f64)> {
    let mut q = vec![
        ("g_qq", f.g.g_qq, t.g_qq),
        ("g_qc_i", f.g.g_qc_i, t.g_qc),
        ("g_qc_j", f.g.g_qc_j, t.g_qc),
    ];
    if let Some(ec) = t.e_c {
        q.push(("e_c_i", f.e_c.0, ec));
        q.push(("e_c_j", f.e_c.1, ec));
    }
    q
}

fn residuals(f: &Forward, t: &DesignTargets) -> DVector<f64> {
    let q = quantities(f, t);
    DVector::from_iterator(
        q.len(),
        q.iter().map(|(_, v, target)| (v - target) / target),
    )
}

/// Each target must lie between the smallest and largest value of its quantity over the
/// corners of the combined dimension box.
fn bracket(problem: &DesignProblem, targets: &DesignTargets, labels: [&str; 3]) -> Result<()> {
    let n = problem.n_dims();
    if n > 24 {
        return Err(Error::InvalidParameter(format!(
            "{n} design dimensions is too many to bracket"
        )));
    }
    let bounds = (0..1usize << n)
        .into_par_iter()
        .map(|k| -> Result<Vec<(f64, f64)>> {
            let f = problem.corner(k, labels)?;
            Ok(quantities(&f, targets)
                .into_iter()
                .map(|(_, v, _)| (v, v))
                .collect())
        })
        .try_reduce_with(|a, b| {
            Ok(a.iter()
                .zip(&b)
                .map(|(x, y)| (x.0.min(y.0), x.1.max(y.1)))
                .collect())
        })
        .expect("at least one corner")?;
    let probe = problem.corner(0, labels)?;
    for ((name, _, target), (min, max)) in quantities(&probe, targets).into_iter().zip(bounds) {
        if !(min..=max).contains(&target) {
            return Err(Error::Unreachable {
                quantity: name.into(),
                target,
                min,
                max,
            });
        }
    }
    Ok(())
}

/// Damped Gauss–Newton (Levenberg–Marquardt) over normalised dimensions, clamped to the LUT
/// boxes and started from their centres.
pub fn design_search(targets: &DesignTargets, problem: &DesignProblem) -> Result<DesignResult> {
    if !(targets.g_qq > 0.0 && targets.g_qc > 0.0 && targets.e_c.is_none_or(|e| e > 0.0)) {
        return Err(Error::InvalidParameter(
            "design targets must be positive".into(),
        ));
    }
    let labels = problem.labels()?;
    bracket(problem, targets, labels)?;

    let n = problem.n_dims();
    let cost = |r: &DVector<f64>| r.norm_squared();
    let mut u = vec![0.5; n];
    let mut r = residuals(&problem.forward(&u, labels)?, targets);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while r.amax() > problem.tolerance && iterations < problem.max_iterations && lambda < 1e10 {
        iterations += 1;
        let mut jac = DMatrix::zeros(r.len(), n);
        for k in 0..n {
            let h = 1e-6;
            let (lo, hi) = ((u[k] - h).max(0.0), (u[k] + h).min(1.0));
            let (mut a, mut b) = (u.clone(), u.clone());
            a[k] = lo;
            b[k] = hi;
            let d = (residuals(&problem.forward(&b, labels)?, targets)
                - residuals(&problem.forward(&a, labels)?, targets))
                / (hi - lo);
            jac.set_column(k, &d);
        }
        let jt = jac.transpose();
        loop {
            let lhs = &jt * &jac + DMatrix::identity(n, n) * lambda;
            let step = lhs
                .cholesky()
                .ok_or(Error::SingularMatrix)?
                .solve(&(-&jt * &r));
            let trial: Vec<f64> = u
                .iter()
                .zip(step.iter())
                .map(|(x, s)| (x + s).clamp(0.0, 1.0))
                .collect();
            let rt = residuals(&problem.forward(&trial, labels)?, targets);
            if cost(&rt) < cost(&r) {
                u = trial;
                r = rt;
                lambda = (lambda / 3.0).max(1e-12);
                break;
            }
            lambda *= 4.0;
            if lambda >= 1e10 {
                break;
            }
        }
    }
    if r.amax() > problem.tolerance.max(0.01) {
        return Err(Error::NonConvergence {
            iterations,
            residual: r.amax(),
        });
    }

    let f = problem.forward(&u, labels)?;
    let [dims_i, dims_c, dims_j] = problem.split(&u);
    Ok(DesignResult {
        dims_i,
        dims_c,
        dims_j,
        couplings: f.g,
        e_c_i: f.e_c.0,
        e_c_j: f.e_c.1,
        residuals: quantities(&f, targets)
            .into_iter()
            .map(|(name, v, t)| (name.to_string(), (v - t) / t))
            .collect(),
        iterations,
    })
}
