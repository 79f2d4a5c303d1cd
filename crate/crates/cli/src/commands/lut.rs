use std::path::PathBuf;

use nalgebra::DMatrix;
use serde::Serialize;
use tcsim_core::captable::{
    design_search, DesignProblem, DesignResult, DesignTargets, GeometryLUT, SyntheticPair,
};
use tcsim_core::io::CsvTable;
use tcsim_core::{Error, Result};

use super::output;
use crate::config::LutConfig;
use crate::Context;

/// Largest error the self-test accepts, relative to the largest corner entry.
pub const SELF_TEST_TOLERANCE: f64 = 1e-12;

fn tables(ctx: &Context, cfg: &LutConfig) -> Result<([GeometryLUT; 3], Option<SyntheticPair>)> {
    match &cfg.luts {
        Some(f) => Ok((
            [
                GeometryLUT::load(&f.q_i)?,
                GeometryLUT::load(&f.coupler)?,
                GeometryLUT::load(&f.q_j)?,
            ],
            None,
        )),
        None => {
            let s = &cfg.synthetic;
            if !(s.perturbation >= 0.0 && s.perturbation < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "perturbation {} must lie in [0, 1)",
                    s.perturbation
                )));
            }
            let mut pair = SyntheticPair::default();
            pair.q_i.curvature = s.curvature;
            pair.coupler.curvature = s.curvature;
            pair.q_j.curvature = s.curvature;
            Ok((pair.luts(s.perturbation, ctx.seed), Some(pair)))
        }
    }
}

/// Points of the unit cube from an additive recurrence; deterministic and well spread.
fn probe_points(n_dims: usize, n: usize) -> Vec<Vec<f64>> {
    let alpha: Vec<f64> = (0..n_dims)
        .map(|k| ((k + 2) as f64).sqrt().fract())
        .collect();
    (1..=n)
        .map(|i| alpha.iter().map(|a| (i as f64 * a).fract()).collect())
        .collect()
}

fn at(lut: &GeometryLUT, u: &[f64]) -> Vec<f64> {
    lut.dims
        .iter()
        .zip(u)
        .map(|(d, t)| d.low + t * (d.high - d.low))
        .collect()
}

#[derive(Debug, Serialize)]
struct TableCheck {
    table: String,
    corners: usize,
    /// Worst relative error at the corners.
    corner_error: f64,
    /// Interpolated centre against the mean of all corners.
    centre_error: f64,
    /// Against the generating functions, when the tables are synthetic and exactly multilinear.
    multilinear_error: Option<f64>,
    pass: bool,
}

/// Capacitance matrix as a function of the dimension values.
type Truth<'a> = &'a dyn Fn(&[f64]) -> DMatrix<f64>;

fn check(lut: &GeometryLUT, truth: Option<Truth>) -> Result<TableCheck> {
    let scale = lut
        .corner_capacitances
        .iter()
        .map(|c| c.amax())
        .fold(f64::MIN_POSITIVE, f64::max);
    let n = lut.n_dims();
    let mut corner_error = 0.0f64;
    for (k, c) in lut.corner_capacitances.iter().enumerate() {
        let u: Vec<f64> = (0..n).map(|a| (k >> a & 1) as f64).collect();
        let m = lut.interpolate(&at(lut, &u))?.matrix;
        corner_error = corner_error.max((m - c).amax() / scale);
    }
    let mean = lut
        .corner_capacitances
        .iter()
        .fold(None, |acc: Option<DMatrix<f64>>, c| {
            Some(acc.map_or_else(|| c.clone(), |a| a + c))
        });
    let mean = mean.expect("validated tables have corners") / lut.corner_capacitances.len() as f64;
    let centre = lut.interpolate(&at(lut, &vec![0.5; n]))?.matrix;
    let centre_error = (centre - mean).amax() / scale;
    let multilinear_error = match truth {
        Some(f) => {
            let mut worst = 0.0f64;
            for u in probe_points(n, 64) {
                let x = at(lut, &u);
                worst = worst.max((lut.interpolate(&x)?.matrix - f(&x)).amax() / scale);
            }
            Some(worst)
        }
        None => None,
    };
    let pass = corner_error <= SELF_TEST_TOLERANCE
        && centre_error <= SELF_TEST_TOLERANCE
        && multilinear_error.is_none_or(|e| e <= SELF_TEST_TOLERANCE);
    Ok(TableCheck {
        table: lut.name.clone(),
        corners: lut.corner_capacitances.len(),
        corner_error,
        centre_error,
        multilinear_error,
        pass,
    })
}

#[derive(Debug, Serialize)]
struct DesignReport<'a> {
    targets: &'a DesignTargets,
    tables: [&'a str; 3],
    result: &'a DesignResult,
}

pub fn run(ctx: &Context) -> anyhow::Result<Vec<PathBuf>> {
    let cfg = &ctx.run.lut_design;
    let (luts, synthetic) = tables(ctx, cfg)?;
    let mut out = output(ctx, "lut-design", cfg)?;
    for lut in &luts {
        lut.validate()?;
        for w in lut.dominance_warnings() {
            eprintln!("warning: {}: {w}", lut.name);
        }
    }

    if cfg.self_test {
        // the generating functions are only an oracle when the tables sample them exactly
        let exact = synthetic
            .as_ref()
            .filter(|_| cfg.synthetic.perturbation == 0.0 && cfg.synthetic.curvature == 0.0);
        let checks = match exact {
            Some(p) => [
                check(&luts[0], Some(&|x: &[f64]| p.q_i.matrix(x)))?,
                check(&luts[1], Some(&|x: &[f64]| p.coupler.matrix(x)))?,
                check(&luts[2], Some(&|x: &[f64]| p.q_j.matrix(x)))?,
            ],
            None => [
                check(&luts[0], None)?,
                check(&luts[1], None)?,
                check(&luts[2], None)?,
            ],
        };
        let pass = checks.iter().all(|c| c.pass);
        for c in &checks {
            println!(
                "{} {}: corner {:.1e}, centre {:.1e}, multilinear {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.table,
                c.corner_error,
                c.centre_error,
                c.multilinear_error
                    .map_or("n/a".into(), |e| format!("{e:.1e}"))
            );
        }
        out.json("self_test.json", &checks)?;
        if !pass {
            return Err(Error::InvalidParameter(format!(
                "lookup tables fail the exactness self-test at tolerance {SELF_TEST_TOLERANCE:e}"
            ))
            .into());
        }
        return Ok(out.into_written());
    }

    if synthetic.is_some() {
        for lut in &luts {
            let text = out.meta().csv_header() + &lut.to_toml_string();
            out.raw(&format!("luts/{}.toml", lut.name), text)?;
        }
    }
    let names = [
        luts[0].name.clone(),
        luts[1].name.clone(),
        luts[2].name.clone(),
    ];
    let [q_i, coupler, q_j] = luts;
    let mut problem = DesignProblem::new(q_i, coupler, q_j, cfg.josephson.clone());
    problem.max_iterations = cfg.max_iterations;
    problem.tolerance = cfg.tolerance;
    let result = design_search(&cfg.targets, &problem)?;
    println!(
        "g_qq {:.4} MHz, g_qc {:.4} / {:.4} MHz after {} iterations (max residual {:.2e})",
        result.couplings.g_qq,
        result.couplings.g_qc_i,
        result.couplings.g_qc_j,
        result.iterations,
        result.max_residual()
    );
    let mut dims = CsvTable::new(["table", "dimension", "value"]);
    for (lut, values) in [
        (&problem.q_i, &result.dims_i),
        (&problem.coupler, &result.dims_c),
        (&problem.q_j, &result.dims_j),
    ] {
        for (d, v) in lut.dims.iter().zip(values) {
            dims.push(vec![
                lut.name.as_str().into(),
                d.name.as_str().into(),
                (*v).into(),
            ]);
        }
    }
    out.csv("design_dims.csv", &dims)?;
    let tables = [names[0].as_str(), names[1].as_str(), names[2].as_str()];
    out.json(
        "design.json",
        &DesignReport {
            targets: &cfg.targets,
            tables,
            result: &result,
        },
    )?;
    Ok(out.into_written())
}
