//! Monte Carlo of a repeated weight-2 X-type parity check read out through an ancilla, with a
//! spectator transmon coupled to the ancilla by a residual ZZ interaction.
//!
//! Each shot tracks three bits: the data parity, the ancilla outcome flip accumulated within the
//! round, and a leaked flag for the ancilla (plus the spectator state). Coherent phase kicks on
//! the ancilla enter as outcome-flip probabilities `sin^2(phi/2)`.

mod sweeps;

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::io::CsvTable;
use crate::{Error, Result};

pub use sweeps::{
    defect_rate_vs_bias, emulated_zz_detuning, readout_amplitude_sweep, AmplitudeScan, BiasPoint,
    BiasScan, DetuningScan, ReadoutErrorModel,
};

/// Error budget of one parity-check round. Probabilities are per operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorChannelSet {
    /// Depolarizing error of each single-qubit gate on the ancilla.
    pub p1: f64,
    /// Two-qubit depolarizing error of each CZ.
    pub p2: f64,
    /// Ancilla leakage per CZ.
    pub l1_cz: f64,
    /// Symmetric readout assignment error.
    pub eps_ro: f64,
    /// Ancilla leakage per measurement.
    pub p_leak_meas: f64,
    /// Probability per round that a leaked ancilla returns.
    pub seepage: f64,
    /// Residual ZZ between ancilla and spectator, kHz.
    pub xi_zz_spectator: f64,
    /// Ancilla excitation lost to the spectator per measurement with the spectator excited.
    pub j2_exchange_prob: f64,
    /// Time per round during which the ZZ phase accumulates, ns.
    pub t_exposure: f64,
    /// Phase-flip probability of each data qubit per round from idling.
    #[serde(default)]
    pub p_idle: f64,
    /// Extra ancilla leakage per CZ with the spectator excited, per MHz^2 of `xi_zz_spectator`.
    #[serde(default)]
    pub zz_leak_coeff: f64,
}

impl Default for ErrorChannelSet {
    fn default() -> Self {
        ErrorChannelSet {
            p1: 0.0,
            p2: 0.0,
            l1_cz: 0.0,
            eps_ro: 0.0,
            p_leak_meas: 0.0,
            seepage: 0.0,
            xi_zz_spectator: 0.0,
            j2_exchange_prob: 0.0,
            t_exposure: 120.0,
            p_idle: 0.0,
            zz_leak_coeff: 0.0,
        }
    }
}

impl ErrorChannelSet {
    /// Budget of the reference device: measured gate errors and leakage, a 2% assignment error,
    /// and idling and seepage over a 1 us round from the coherence times.
    pub fn reference() -> Self {
        ErrorChannelSet {
            p1: 0.00056,
            p2: 0.0055,
            l1_cz: 0.00051,
            eps_ro: 0.02,
            p_leak_meas: 0.0001,
            seepage: 0.05,
            xi_zz_spectator: 0.0,
            j2_exchange_prob: 0.0,
            t_exposure: 120.0,
            p_idle: 0.006,
            zz_leak_coeff: 0.015,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("p1", self.p1),
            ("p2", self.p2),
            ("l1_cz", self.l1_cz),
            ("eps_ro", self.eps_ro),
            ("p_leak_meas", self.p_leak_meas),
            ("seepage", self.seepage),
            ("j2_exchange_prob", self.j2_exchange_prob),
            ("p_idle", self.p_idle),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {p} is not a probability"
                )));
            }
        }
        if !(self.t_exposure >= 0.0
            && self.zz_leak_coeff >= 0.0
            && self.xi_zz_spectator.is_finite())
        {
            return Err(Error::InvalidParameter(
                "t_exposure and zz_leak_coeff must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Ancilla phase from one excited-spectator round, radians.
    pub fn zz_phase(&self) -> f64 {
        TAU * self.xi_zz_spectator * 1e-6 * self.t_exposure
    }
}

/// How the ancilla is disturbed from round to round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TogglePattern {
    /// The spectator is flipped at the start of every round when `toggle_spectator` is set.
    EveryRound,
    /// The spectator stays put; the ancilla is detuned during both CZs of odd rounds.
    OddRoundsDetuning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParityExperiment {
    pub data_qubits: [String; 2],
    pub ancilla: String,
    pub spectator: String,
    pub n_rounds: usize,
    pub n_shots: usize,
    pub toggle_spectator: bool,
    pub toggle_parity: TogglePattern,
    /// Spectator coupler frequency, GHz.
    pub coupler_bias: f64,
    pub error_params: ErrorChannelSet,
    pub seed: u64,
    /// Spectator state before round 1.
    #[serde(default)]
    pub spectator_excited: bool,
    /// Ancilla detuning during the CZs of odd rounds, MHz.
    #[serde(default)]
    pub ancilla_detuning: f64,
    /// ns.
    #[serde(default = "default_t_cz")]
    pub t_cz: f64,
}

fn default_t_cz() -> f64 {
    60.0
}

impl ParityExperiment {
    /// X-parity of Q1 and Q2 through ancilla Q0 with spectator Q4 on coupler C04.
    pub fn reference(n_rounds: usize, n_shots: usize, seed: u64) -> Self {
        ParityExperiment {
            data_qubits: ["Q1".into(), "Q2".into()],
            ancilla: "Q0".into(),
            spectator: "Q4".into(),
            n_rounds,
            n_shots,
            toggle_spectator: false,
            toggle_parity: TogglePattern::EveryRound,
            coupler_bias: 6.383,
            error_params: ErrorChannelSet::reference(),
            seed,
            spectator_excited: false,
            ancilla_detuning: 0.0,
            t_cz: default_t_cz(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rounds < 2 || self.n_shots == 0 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 rounds and 1 shot, got {} and {}",
                self.n_rounds, self.n_shots
            )));
        }
        if !(self.t_cz >= 0.0) || !self.ancilla_detuning.is_finite() {
            return Err(Error::InvalidParameter("t_cz must be non-negative".into()));
        }
        self.error_params.validate()
    }

    /// Spectator excited during round `r` (1-based).
    fn spectator_in(&self, r: usize) -> bool {
        let toggled =
            self.toggle_spectator && self.toggle_parity == TogglePattern::EveryRound && r % 2 == 1;
        self.spectator_excited ^ toggled
    }

    /// Total ancilla phase kick in round `r`, radians.
    fn kick(&self, r: usize) -> f64 {
        let mut phi = if self.spectator_in(r) {
            self.error_params.zz_phase()
        } else {
            0.0
        };
        if self.toggle_parity == TogglePattern::OddRoundsDetuning && r % 2 == 1 {
            phi += 2.0 * TAU * self.ancilla_detuning * 1e-3 * self.t_cz;
        }
        phi
    }
}

/// Outcome bits, one row of `n_rounds` per shot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcomes {
    n_rounds: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Outcomes {
    fn new(n_shots: usize, n_rounds: usize) -> Self {
        let words = n_rounds.div_ceil(64);
        Outcomes {
            n_rounds,
            words,
            bits: vec![0; n_shots * words],
        }
    }

    pub fn n_shots(&self) -> usize {
        self.bits.len() / self.words
    }

    pub fn n_rounds(&self) -> usize {
        self.n_rounds
    }

    /// Outcome of `shot` in round `r` (1-based).
    pub fn get(&self, shot: usize, r: usize) -> bool {
        let k = r - 1;
        self.bits[shot * self.words + k / 64] >> (k % 64) & 1 == 1
    }
}

/// Per-round statistics. Index `r - 1` holds round `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectCurve {
    /// `None` for round 1, which has no predecessor.
    pub defect_rate: Vec<Option<f64>>,
    pub leak_population: Vec<f64>,
    pub n_shots: usize,
}

impl DefectCurve {
    /// Defect rate of round `r` (1-based, `r >= 2`).
    pub fn at(&self, r: usize) -> f64 {
        self.defect_rate[r - 1].expect("defect rates start at round 2")
    }

    pub fn last(&self) -> f64 {
        self.at(self.defect_rate.len())
    }

    /// Least-squares slope of the defect rate over rounds `first..=last`, per round.
    pub fn slope(&self, first: usize, last: usize) -> f64 {
        let pts: Vec<(f64, f64)> = (first.max(2)..=last.min(self.defect_rate.len()))
            .map(|r| (r as f64, self.at(r)))
            .collect();
        let n = pts.len() as f64;
        let (mx, my) = pts
            .iter()
            .fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            0.0
        }
    }

    /// Binomial standard error of the defect rate at round `r`.
    pub fn std_error(&self, r: usize) -> f64 {
        let p = self.at(r);
        (p * (1.0 - p) / self.n_shots as f64).sqrt()
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(["round", "defect_rate", "leak_population"]);
        for (k, (d, l)) in self
            .defect_rate
            .iter()
            .zip(&self.leak_population)
            .enumerate()
        {
            t.push(vec![(k + 1).into(), (*d).into(), (*l).into()]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParityRunResult {
    pub outcomes: Outcomes,
    pub defect_rate: Vec<Option<f64>>,
    pub leak_population: Vec<f64>,
}

impl ParityRunResult {
    pub fn curve(&self) -> DefectCurve {
        DefectCurve {
            defect_rate: self.defect_rate.clone(),
            leak_population: self.leak_population.clone(),
            n_shots: self.outcomes.n_shots(),
        }
    }
}

/// One shot: outcome bits (bit `r - 1` for round `r`) and the leaked flag after each round.
fn shot(
    exp: &ParityExperiment,
    kicks: &[f64],
    rng: &mut ChaCha8Rng,
    bits: &mut [u64],
    leaked_after: &mut [bool],
) {
    let e = &exp.error_params;
    let p_rot = 2.0 * e.p1 / 3.0;
    let zz_leak = e.zz_leak_coeff * (e.xi_zz_spectator * 1e-3).powi(2);
    // X parity of |00> is undetermined until the first round projects it
    let mut parity = rng.random::<bool>();
    let mut leaked = false;
    for r in 1..=exp.n_rounds {
        let spectator = exp.spectator_in(r);
        let was_leaked = leaked;
        let mut garbled = was_leaked;
        if was_leaked {
            if rng.random::<f64>() < e.seepage {
                leaked = false;
                garbled = false;
            }
        } else {
            let l_cz = (e.l1_cz + if spectator { zz_leak } else { 0.0 }).min(1.0);
            for _ in 0..2 {
                if rng.random::<f64>() < l_cz {
                    leaked = true;
                }
            }
            if rng.random::<f64>() < e.p_leak_meas {
                leaked = true;
            }
            garbled = leaked;
        }

        for _ in 0..2 {
            if rng.random::<f64>() < e.p_idle {
                parity = !parity;
            }
        }
        let mut flip = rng.random::<f64>() < p_rot;
        for _ in 0..2 {
            if rng.random::<f64>() < e.p2 {
                // one of the 15 non-identity two-qubit Paulis; components 2 (Y) and 3 (Z)
                // anticommute with X
                let k = rng.random_range(1..16u32);
                let (a, d) = (k / 4, k % 4);
                if a >= 2 {
                    flip = !flip;
                }
                if d >= 2 {
                    parity = !parity;
                }
            }
        }
        let phi = kicks[r - 1];
        if phi != 0.0 && rng.random::<f64>() < (0.5 * phi).sin().powi(2) {
            flip = !flip;
        }
        if rng.random::<f64>() < p_rot {
            flip = !flip;
        }
        let mut bit = parity ^ flip;
        if spectator && bit && rng.random::<f64>() < e.j2_exchange_prob {
            bit = false;
        }
        if garbled {
            bit = rng.random::<bool>();
        } else if rng.random::<f64>() < e.eps_ro {
            bit = !bit;
        }
        if bit {
            bits[(r - 1) / 64] |= 1 << ((r - 1) % 64);
        }
        leaked_after[r - 1] = leaked;
    }
}

const CHUNK: usize = 256;

/// Runs all shots; shot `s` draws from a ChaCha8 stream `s` of the experiment seed, so results
/// do not depend on the thread count.
pub fn run_parity(exp: &ParityExperiment) -> Result<ParityRunResult> {
    exp.validate()?;
    let n = exp.n_rounds;
    let kicks: Vec<f64> = (1..=n).map(|r| exp.kick(r)).collect();
    let mut outcomes = Outcomes::new(exp.n_shots, n);
    let words = outcomes.words;
    let leak_counts = outcomes
        .bits
        .par_chunks_mut(words * CHUNK)
        .enumerate()
        .map(|(c, block)| {
            let mut counts = vec![0u64; n];
            let mut leaked = vec![false; n];
            for (i, row) in block.chunks_mut(words).enumerate() {
                let mut rng = ChaCha8Rng::seed_from_u64(exp.seed);
                rng.set_stream((c * CHUNK + i) as u64);
                shot(exp, &kicks, &mut rng, row, &mut leaked);
                for (k, &l) in leaked.iter().enumerate() {
                    counts[k] += l as u64;
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; n],
            |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        );

    let shots = exp.n_shots as f64;
    let mut defect_rate = vec![None; n];
    for (r, slot) in defect_rate
        .iter_mut()
        .enumerate()
        .skip(1)
        .map(|(k, s)| (k + 1, s))
    {
        let defects = (0..exp.n_shots)
            .filter(|&s| outcomes.get(s, r) != outcomes.get(s, r - 1))
            .count();
        *slot = Some(defects as f64 / shots);
    }
    let leak_population = leak_counts.iter().map(|&c| c as f64 / shots).collect();
    Ok(ParityRunResult {
        outcomes,
        defect_rate,
        leak_population,
    })
}

/// Leaked fraction after each round for per-round leakage `l` and seepage `s`:
/// `p_{r+1} = p_r (1 - s) + (1 - p_r) l` from `p_0 = 0`.
pub fn leak_markov_chain(l: f64, s: f64, n_rounds: usize) -> Vec<f64> {
    let mut p = 0.0;
    (0..n_rounds)
        .map(|_| {
            p = p * (1.0 - s) + (1.0 - p) * l;
            p
        })
        .collect()
}
