use rayon::prelude::*;
use serde::Serialize;

use super::exchange::{exchange_coupling, xi_zz, Manifold};
use crate::device::DeviceGraph;
use crate::io::CsvTable;
use crate::{Error, Result};

/// Root refinement stops once the bracket is narrower than this, GHz.
pub const NULL_TOLERANCE: f64 = 1e-4;

/// A curve whose largest magnitude in the window is below this is treated as identically zero.
const DEGENERATE_SCALE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Quantity {
    XiZz,
    J1,
    J2,
}

impl Quantity {
    pub const ALL: [Quantity; 3] = [Quantity::XiZz, Quantity::J1, Quantity::J2];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::XiZz => "xi_zz",
            Quantity::J1 => "j1",
            Quantity::J2 => "j2",
        }
    }
}

/// A zero crossing of one interaction curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Null {
    /// Coupler frequency of the first confirmed root, GHz.
    pub frequency: Option<f64>,
    /// Every confirmed root in the window, ascending.
    pub roots: Vec<f64>,
    /// The curve vanishes everywhere in the window.
    pub degenerate: bool,
}

impl Null {
    pub fn is_valid(&self) -> bool {
        self.frequency.is_some() && !self.degenerate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Nulls {
    pub xi_zz: Null,
    pub j1: Null,
    pub j2: Null,
}

impl Nulls {
    pub fn get(&self, q: Quantity) -> &Null {
        match q {
            Quantity::XiZz => &self.xi_zz,
            Quantity::J1 => &self.j1,
            Quantity::J2 => &self.j2,
        }
    }

    /// All three nulls exist and no two lie within `min_separation` GHz of each other.
    pub fn pairwise_distinct(&self, min_separation: f64) -> bool {
        let f: Vec<f64> = Quantity::ALL
            .iter()
            .filter_map(|&q| self.get(q).frequency)
            .collect();
        f.len() == 3
            && (f[0] - f[1]).abs() > min_separation
            && (f[0] - f[2]).abs() > min_separation
            && (f[1] - f[2]).abs() > min_separation
    }
}

/// Interaction curves of one edge versus coupler frequency. Masked samples are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionProfile {
    pub edge: String,
    /// GHz.
    pub coupler_freqs: Vec<f64>,
    /// kHz.
    pub xi_zz: Vec<Option<f64>>,
    /// MHz.
    pub j1: Vec<Option<f64>>,
    /// MHz.
    pub j2: Vec<Option<f64>>,
    pub nulls: Nulls,
}

/// Evaluates the interactions of one edge with the transmons parked at their sweetspots.
#[derive(Debug, Clone)]
pub struct EdgeProbe {
    graph: DeviceGraph,
    qubit_a: String,
    qubit_b: String,
    base: Vec<f64>,
}

impl EdgeProbe {
    pub fn new(graph: &DeviceGraph, edge: &str) -> Result<Self> {
        let e = graph.edge(edge)?.clone();
        let sub = graph.edge_subsystem(&e)?;
        let base = sub.sweetspot_frequencies();
        Ok(EdgeProbe {
            graph: sub,
            qubit_a: e.qubit_a,
            qubit_b: e.qubit_b,
            base,
        })
    }

    /// Three-mode subsystem `[qubit_a, coupler, qubit_b]`.
    pub fn subsystem(&self) -> &DeviceGraph {
        &self.graph
    }

    pub fn frequencies(&self, f_coupler: f64) -> Vec<f64> {
        let mut f = self.base.clone();
        f[1] = f_coupler;
        f
    }

    pub fn evaluate(&self, q: Quantity, f_coupler: f64) -> Result<f64> {
        let f = self.frequencies(f_coupler);
        let (g, a, b) = (&self.graph, self.qubit_a.as_str(), self.qubit_b.as_str());
        match q {
            Quantity::XiZz => xi_zz(g, &f, a, b),
            Quantity::J1 => Ok(exchange_coupling(g, &f, a, b, Manifold::OneExcitation)?.j),
            Quantity::J2 => Ok(exchange_coupling(g, &f, a, b, Manifold::TwoExcitation)?.j),
        }
    }

    /// Coupler arc `[minimum, sweetspot]`, GHz.
    pub fn coupler_range(&self) -> (f64, f64) {
        let c = &self.graph.modes[1];
        (c.arc_minimum(), c.f_sweetspot)
    }
}

/// Masks a failed evaluation; other errors propagate.
fn masked(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::AmbiguousLabeling { .. } | Error::NoCrossingInWindow) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Bisection of a sign change; `None` if the bracket turns out to be masked.
fn refine(
    probe: &EdgeProbe,
    q: Quantity,
    mut lo: f64,
    mut hi: f64,
    mut v_lo: f64,
) -> Result<Option<f64>> {
    while hi - lo > NULL_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let Some(v) = masked(probe.evaluate(q, mid))? else {
            return Ok(None);
        };
        if v == 0.0 {
            return Ok(Some(mid));
        }
        if (v < 0.0) == (v_lo < 0.0) {
            lo = mid;
            v_lo = v;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

fn locate_nulls(
    probe: &EdgeProbe,
    q: Quantity,
    freqs: &[f64],
    values: &[Option<f64>],
) -> Result<Null> {
    let scale = values.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale < DEGENERATE_SCALE {
        return Ok(Null {
            frequency: None,
            roots: Vec::new(),
            degenerate: true,
        });
    }
    let mut roots = Vec::new();
    for k in 0..freqs.len().saturating_sub(1) {
        let (Some(v0), Some(v1)) = (values[k], values[k + 1]) else {
            continue;
        };
        if v0 == 0.0 {
            roots.push(freqs[k]);
            continue;
        }
        if (v0 < 0.0) == (v1 < 0.0) {
            continue;
        }
        let Some(root) = refine(probe, q, freqs[k], freqs[k + 1], v0)? else {
            continue;
        };
        // a sign change through a pole re-evaluates large and is rejected
        if let Some(v) = masked(probe.evaluate(q, root))? {
            if v.abs() <= 0.01 * scale {
                roots.push(root);
            }
        }
    }
    Ok(Null {
        frequency: roots.first().copied(),
        roots,
        degenerate: false,
    })
}

/// Samples `xi_ZZ`, `J1` and `J2` on `n_points` coupler frequencies spanning `window` (GHz) and
/// locates their zero crossings.
pub fn interaction_profile(
    graph: &DeviceGraph,
    edge: &str,
    window: (f64, f64),
    n_points: usize,
) -> Result<InteractionProfile> {
    let probe = EdgeProbe::new(graph, edge)?;
    let (lo, hi) = window;
    let (arc_min, arc_max) = probe.coupler_range();
    if !(lo < hi) || n_points < 2 {
        return Err(Error::InvalidParameter(format!(
            "window [{lo}, {hi}] GHz with {n_points} points is not a valid grid"
        )));
    }
    if lo < arc_min || hi > arc_max + 1e-12 {
        return Err(Error::OutOfArcRange {
            mode: probe.graph.modes[1].label.clone(),
            target: if lo < arc_min { lo } else { hi },
            min: arc_min,
            max: arc_max,
        });
    }
    let freqs: Vec<f64> = (0..n_points)
        .map(|k| lo + (hi - lo) * k as f64 / (n_points - 1) as f64)
        .collect();
    let samples: Vec<[Option<f64>; 3]> = freqs
        .par_iter()
        .map(|&f| -> Result<[Option<f64>; 3]> {
            Ok([
                masked(probe.evaluate(Quantity::XiZz, f))?,
                masked(probe.evaluate(Quantity::J1, f))?,
                masked(probe.evaluate(Quantity::J2, f))?,
            ])
        })
        .collect::<Result<_>>()?;
    let column = |i: usize| samples.iter().map(|s| s[i]).collect::<Vec<_>>();
    let (xi, j1, j2) = (column(0), column(1), column(2));
    let nulls = Nulls {
        xi_zz: locate_nulls(&probe, Quantity::XiZz, &freqs, &xi)?,
        j1: locate_nulls(&probe, Quantity::J1, &freqs, &j1)?,
        j2: locate_nulls(&probe, Quantity::J2, &freqs, &j2)?,
    };
    Ok(InteractionProfile {
        edge: graph.edge(edge)?.name(),
        coupler_freqs: freqs,
        xi_zz: xi,
        j1,
        j2,
        nulls,
    })
}

/// Zero crossings of a single curve sampled on `n_points` coupler frequencies over `window`.
pub fn find_null(
    graph: &DeviceGraph,
    edge: &str,
    q: Quantity,
    window: (f64, f64),
    n_points: usize,
) -> Result<Null> {
    let probe = EdgeProbe::new(graph, edge)?;
    let (lo, hi) = window;
    if !(lo < hi) || n_points < 2 {
        return Err(Error::InvalidParameter(format!(
            "window [{lo}, {hi}] GHz is not a valid grid"
        )));
    }
    let freqs: Vec<f64> = (0..n_points)
        .map(|k| lo + (hi - lo) * k as f64 / (n_points - 1) as f64)
        .collect();
    let values = freqs
        .par_iter()
        .map(|&f| masked(probe.evaluate(q, f)))
        .collect::<Result<Vec<_>>>()?;
    locate_nulls(&probe, q, &freqs, &values)
}

impl InteractionProfile {
    /// Columns `f_coupler_ghz, xi_zz_khz, j1_mhz, j2_mhz` and one mask flag per curve.
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new([
            "f_coupler_ghz",
            "xi_zz_khz",
            "j1_mhz",
            "j2_mhz",
            "xi_zz_masked",
            "j1_masked",
            "j2_masked",
        ]);
        for k in 0..self.coupler_freqs.len() {
            t.push(vec![
                self.coupler_freqs[k].into(),
                self.xi_zz[k].into(),
                self.j1[k].into(),
                self.j2[k].into(),
                self.xi_zz[k].is_none().into(),
                self.j1[k].is_none().into(),
                self.j2[k].is_none().into(),
            ]);
        }
        t
    }

    /// Linear interpolation of `xi_ZZ` (kHz) at coupler frequency `f`; `None` if masked or outside.
    pub fn xi_zz_at(&self, f: f64) -> Option<f64> {
        interpolate(&self.coupler_freqs, &self.xi_zz, f)
    }
}

fn interpolate(xs: &[f64], ys: &[Option<f64>], x: f64) -> Option<f64> {
    let k = xs.windows(2).position(|w| x >= w[0] && x <= w[1])?;
    let (y0, y1) = (ys[k]?, ys[k + 1]?);
    let t = (x - xs[k]) / (xs[k + 1] - xs[k]);
    Some(y0 + t * (y1 - y0))
}
