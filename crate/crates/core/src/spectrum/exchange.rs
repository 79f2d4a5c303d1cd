use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::labeling::DressedLabeling;
use crate::device::DeviceGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Manifold {
    /// `|0_lo 1_hi> <-> |1_lo 0_hi>`, reached by tuning the higher qubit down.
    OneExcitation,
    /// `|1_lo 1_hi> <-> |0_lo 2_hi>`, reached by tuning the lower qubit to `f_hi + alpha_hi`.
    TwoExcitation,
}

/// Half-width of the bare-frequency window searched for an avoided crossing, GHz.
pub const EXCHANGE_WINDOW: f64 = 0.06;

const GOLDEN_TOLERANCE: f64 = 1e-9;

fn state(n_modes: usize, occ: &[(usize, usize)]) -> Vec<usize> {
    let mut s = vec![0; n_modes];
    for &(m, n) in occ {
        s[m] = n;
    }
    s
}

/// `xi_ZZ = E11 - E10 - E01 + E00` over dressed energies, every other mode in its ground state.
/// kHz; positive values raise `|11>`.
pub fn xi_zz(
    graph: &DeviceGraph,
    frequencies: &[f64],
    qubit_a: &str,
    qubit_b: &str,
) -> Result<f64> {
    let (a, b) = (graph.mode_index(qubit_a)?, graph.mode_index(qubit_b)?);
    let n = graph.modes.len();
    let labels = [
        state(n, &[]),
        state(n, &[(a, 1)]),
        state(n, &[(b, 1)]),
        state(n, &[(a, 1), (b, 1)]),
    ];
    let h = graph.hamiltonian(frequencies)?;
    let eig = h.eigen();
    let dressed = DressedLabeling::new(&h, &eig, &labels)?;
    dressed.check()?;
    let e = |k: usize| dressed.energy(&labels[k]);
    Ok((e(3) - e(1) - e(2) + e(0)) * 1e6)
}

/// Result of a gap minimisation between two bare states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    /// Signed `Delta_min / 2`, MHz.
    pub j: f64,
    /// Minimum dressed splitting, MHz.
    pub gap_min: f64,
    /// Bare frequency of the swept mode at the minimum, GHz.
    pub resonance: f64,
    /// Splittings at the two window edges, MHz.
    pub gap_edges: (f64, f64),
}

/// Minimum splitting between the dressed partners of bare states `la` and `lb` while mode
/// `swept` is tuned over `center +- half_width`.
///
/// The partners at each point are the two eigenstates with the largest weight in
/// `span{la, lb}`. The sign of `J` is that of the effective coupling: positive when the lower
/// partner is the antisymmetric combination.
pub fn avoided_crossing(
    graph: &DeviceGraph,
    frequencies: &[f64],
    la: &[usize],
    lb: &[usize],
    swept: usize,
    center: f64,
    half_width: f64,
) -> Result<Crossing> {
    let probe = graph.hamiltonian(frequencies)?;
    let ia = probe
        .basis
        .index(la)
        .ok_or(Error::InvalidParameter(format!(
            "{la:?} outside truncation"
        )))?;
    let ib = probe
        .basis
        .index(lb)
        .ok_or(Error::InvalidParameter(format!(
            "{lb:?} outside truncation"
        )))?;

    let gap = |x: f64| -> Result<(f64, f64)> {
        let mut f = frequencies.to_vec();
        f[swept] = x;
        let eig = graph.hamiltonian(&f)?.eigen();
        let weight = |k: usize| eig.vectors[(ia, k)].powi(2) + eig.vectors[(ib, k)].powi(2);
        let mut order: Vec<usize> = (0..eig.dim()).collect();
        order.sort_by(|&p, &q| weight(q).total_cmp(&weight(p)));
        let (lo, hi) = if order[0] < order[1] {
            (order[0], order[1])
        } else {
            (order[1], order[0])
        };
        let splitting = (eig.values[hi] - eig.values[lo]) / TAU * 1e3;
        let sign = -(eig.vectors[(ia, lo)] * eig.vectors[(ib, lo)]).signum();
        Ok((splitting, sign))
    };

    let (x_lo, x_hi) = (center - half_width, center + half_width);
    let gap_edges = (gap(x_lo)?.0, gap(x_hi)?.0);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (x_lo, x_hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (gap(c)?.0, gap(d)?.0);
    while b - a > GOLDEN_TOLERANCE {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = gap(c)?.0;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = gap(d)?.0;
        }
    }
    let x = 0.5 * (a + b);
    let (gap_min, sign) = gap(x)?;
    // a minimum pinned to the window boundary is not a crossing
    let edge_margin = 1e-3 * half_width;
    if x - x_lo < edge_margin || x_hi - x < edge_margin || gap_min > gap_edges.0.min(gap_edges.1) {
        return Err(Error::NoCrossingInWindow);
    }
    Ok(Crossing {
        j: sign * gap_min / 2.0,
        gap_min,
        resonance: x,
        gap_edges,
    })
}

/// Effective exchange coupling between two transmons in the given manifold, MHz.
///
/// The bare frequency of one transmon is swept through resonance; the frequencies of all other
/// modes stay at `frequencies`.
pub fn exchange_coupling(
    graph: &DeviceGraph,
    frequencies: &[f64],
    qubit_a: &str,
    qubit_b: &str,
    manifold: Manifold,
) -> Result<Crossing> {
    let (a, b) = (graph.mode_index(qubit_a)?, graph.mode_index(qubit_b)?);
    let (lo, hi) = if frequencies[a] <= frequencies[b] {
        (a, b)
    } else {
        (b, a)
    };
    let n = graph.modes.len();
    match manifold {
        Manifold::OneExcitation => avoided_crossing(
            graph,
            frequencies,
            &state(n, &[(hi, 1)]),
            &state(n, &[(lo, 1)]),
            hi,
            frequencies[lo],
            EXCHANGE_WINDOW,
        ),
        Manifold::TwoExcitation => {
            let target = frequencies[hi] + graph.modes[hi].anharmonicity;
            avoided_crossing(
                graph,
                frequencies,
                &state(n, &[(lo, 1), (hi, 1)]),
                &state(n, &[(hi, 2)]),
                lo,
                target,
                EXCHANGE_WINDOW,
            )
        }
    }
}

/// True iff one transmon's 0-1 frequency lies in the other's `[f + alpha, f]` band (inclusive).
pub fn straddling(f_a: f64, alpha_a: f64, f_b: f64, alpha_b: f64) -> bool {
    let inside = |f: f64, f_ref: f64, alpha: f64| f >= f_ref + alpha && f <= f_ref;
    inside(f_b, f_a, alpha_a) || inside(f_a, f_b, alpha_b)
}

/// Straddling check of an edge at the sweetspot frequencies.
pub fn straddling_check(graph: &DeviceGraph, edge: &str) -> Result<bool> {
    let e = graph.edge(edge)?;
    let (a, b) = (graph.mode(&e.qubit_a)?, graph.mode(&e.qubit_b)?);
    Ok(straddling(
        a.f_sweetspot,
        a.anharmonicity,
        b.f_sweetspot,
        b.anharmonicity,
    ))
}
