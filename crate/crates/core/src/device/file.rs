//! TOML device description.
//!
//! ```toml
//! [units]
//! frequency = "GHz"       # f_sweetspot
//! anharmonicity = "MHz"
//! coupling = "MHz"        # g_qq, g_qc, extra couplings
//! time = "us"             # t1, t2_ramsey, t2_echo
//!
//! [[mode]]
//! label = "Q0"
//! kind = "transmon"       # or "coupler"
//! f_sweetspot = 5.295
//! anharmonicity = -275
//! t1 = 31.5
//! t2_ramsey = 12.0
//! t2_echo = 32.8
//!
//! [[edge]]
//! qubit_a = "Q1"
//! qubit_b = "Q0"
//! coupler = "C01"
//! g_qq = 6
//! g_qc = 70               # or g_qc_a / g_qc_b
//! ```
//!
//! Optional mode keys: `squid_asymmetry`, `flux_offset` (flux quanta), `n_levels` (default 3),
//! `flux_noise_amp` (flux quanta). Extra pairwise couplings use `[[coupling]]` with `a`, `b`, `g`.

use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use super::graph::{DeviceGraph, EdgeCoupling, ModeCoupling, NoiseSpec};
use super::mode::{ModeKind, ModeSpec};
use crate::io::{line_at, parse_toml};
use crate::{Error, Result};

const REFERENCE_DEVICE: &str = include_str!("../../data/five_qubit_star.toml");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDevice {
    units: Spanned<RawUnits>,
    #[serde(rename = "mode")]
    modes: Vec<Spanned<RawMode>>,
    #[serde(default, rename = "edge")]
    edges: Vec<Spanned<RawEdge>>,
    #[serde(default, rename = "coupling")]
    couplings: Vec<Spanned<ModeCoupling>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUnits {
    frequency: String,
    anharmonicity: String,
    coupling: String,
    time: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMode {
    label: String,
    kind: ModeKind,
    f_sweetspot: f64,
    anharmonicity: f64,
    #[serde(default)]
    squid_asymmetry: f64,
    #[serde(default)]
    flux_offset: f64,
    #[serde(default = "default_levels")]
    n_levels: usize,
    t1: Option<f64>,
    t2_ramsey: Option<f64>,
    t2_echo: Option<f64>,
    #[serde(default)]
    flux_noise_amp: f64,
}

fn default_levels() -> usize {
    3
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    qubit_a: String,
    qubit_b: String,
    coupler: String,
    g_qq: f64,
    g_qc: Option<f64>,
    g_qc_a: Option<f64>,
    g_qc_b: Option<f64>,
}

/// Parsed device plus soft warnings (coherence-time ordering).
#[derive(Debug, Clone)]
pub struct LoadedDevice {
    pub graph: DeviceGraph,
    pub warnings: Vec<String>,
}

/// Scale factor to GHz.
fn frequency_scale(unit: &str) -> Option<f64> {
    match unit {
        "GHz" => Some(1.0),
        "MHz" => Some(1e-3),
        _ => None,
    }
}

/// Scale factor to MHz.
fn coupling_scale(unit: &str) -> Option<f64> {
    frequency_scale(unit).map(|s| s * 1e3)
}

/// Scale factor to microseconds.
fn time_scale(unit: &str) -> Option<f64> {
    match unit {
        "us" => Some(1.0),
        "ns" => Some(1e-3),
        _ => None,
    }
}

pub fn parse_device(text: &str, file: &str) -> Result<LoadedDevice> {
    let raw: RawDevice = parse_toml(text, file)?;
    let fail = |span: std::ops::Range<usize>, message: String| Error::Validation {
        file: file.to_string(),
        line: line_at(text, span.start),
        message,
    };

    let units_span = raw.units.span();
    let units = raw.units.into_inner();
    let unit = |value: &str, scale: Option<f64>, what: &str| {
        scale.ok_or_else(|| {
            fail(
                units_span.clone(),
                format!("unsupported {what} unit `{value}`"),
            )
        })
    };
    let f_scale = unit(
        &units.frequency,
        frequency_scale(&units.frequency),
        "frequency",
    )?;
    let a_scale = unit(
        &units.anharmonicity,
        frequency_scale(&units.anharmonicity),
        "anharmonicity",
    )?;
    let g_scale = unit(&units.coupling, coupling_scale(&units.coupling), "coupling")?;
    let t_scale = unit(&units.time, time_scale(&units.time), "time")?;

    let mut graph = DeviceGraph {
        modes: Vec::new(),
        edges: Vec::new(),
        extra_couplings: Vec::new(),
        noise: Default::default(),
    };
    let mut warnings = Vec::new();

    for entry in raw.modes {
        let span = entry.span();
        let m = entry.into_inner();
        let spec = ModeSpec {
            label: m.label.clone(),
            kind: m.kind,
            f_sweetspot: m.f_sweetspot * f_scale,
            anharmonicity: m.anharmonicity * a_scale,
            squid_asymmetry: m.squid_asymmetry,
            flux_offset: m.flux_offset,
            n_levels: m.n_levels,
        };
        spec.validate()
            .map_err(|e| fail(span.clone(), e.to_string()))?;
        if graph.modes.iter().any(|o| o.label == spec.label) {
            return Err(fail(span, format!("duplicate mode label {}", spec.label)));
        }
        match (m.t1, m.t2_ramsey, m.t2_echo) {
            (Some(t1), Some(t2r), Some(t2e)) => {
                let noise = NoiseSpec {
                    t1: t1 * t_scale,
                    t2_ramsey: t2r * t_scale,
                    t2_echo: t2e * t_scale,
                    flux_noise_amp: m.flux_noise_amp,
                };
                noise
                    .validate()
                    .map_err(|e| fail(span.clone(), e.to_string()))?;
                for w in noise.warnings() {
                    warnings.push(format!(
                        "{file}:{}: mode {}: {w}",
                        line_at(text, span.start),
                        m.label
                    ));
                }
                graph.noise.insert(m.label.clone(), noise);
            }
            (None, None, None) => {}
            _ => {
                return Err(fail(
                    span,
                    "t1, t2_ramsey and t2_echo must be given together".into(),
                ));
            }
        }
        graph.modes.push(spec);
    }

    for entry in raw.edges {
        let span = entry.span();
        let e = entry.into_inner();
        let (g_a, g_b) = match (e.g_qc, e.g_qc_a, e.g_qc_b) {
            (Some(g), None, None) => (g, g),
            (None, Some(a), Some(b)) => (a, b),
            _ => {
                return Err(fail(
                    span,
                    "give either g_qc or both g_qc_a and g_qc_b".into(),
                ))
            }
        };
        graph.edges.push(EdgeCoupling {
            qubit_a: e.qubit_a,
            qubit_b: e.qubit_b,
            coupler: e.coupler,
            g_qq: e.g_qq * g_scale,
            g_qc_a: g_a * g_scale,
            g_qc_b: g_b * g_scale,
        });
        graph
            .validate()
            .map_err(|err| fail(span, err.to_string()))?;
    }

    for entry in raw.couplings {
        let span = entry.span();
        let mut c = entry.into_inner();
        c.g *= g_scale;
        graph.extra_couplings.push(c);
        graph
            .validate()
            .map_err(|err| fail(span, err.to_string()))?;
    }

    Ok(LoadedDevice { graph, warnings })
}

pub fn load_device(path: &Path) -> Result<LoadedDevice> {
    let text = std::fs::read_to_string(path)?;
    parse_device(&text, &path.display().to_string())
}

impl DeviceGraph {
    /// The shipped five-transmon, four-coupler star device.
    pub fn reference() -> DeviceGraph {
        parse_device(REFERENCE_DEVICE, "five_qubit_star.toml")
            .expect("shipped device file is valid")
            .graph
    }

    pub fn reference_source() -> &'static str {
        REFERENCE_DEVICE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[units]
frequency = "GHz"
anharmonicity = "MHz"
coupling = "MHz"
time = "us"

[[mode]]
label = "Q1"
kind = "transmon"
f_sweetspot = 5.218
anharmonicity = -285

[[mode]]
label = "C"
kind = "coupler"
f_sweetspot = 6275
anharmonicity = -250
"#;

    #[test]
    fn reference_device_loads() {
        let g = DeviceGraph::reference();
        assert_eq!(g.modes.len(), 9);
        assert_eq!(g.edges.len(), 4);
        let q0 = g.mode("Q0").unwrap();
        assert_eq!(q0.f_sweetspot, 5.295);
        assert!((q0.anharmonicity + 0.275).abs() < 1e-15);
        assert_eq!(g.noise_for("Q0").unwrap().t1, 31.5);
        for e in &g.edges {
            assert_eq!((e.g_qq, e.g_qc_a, e.g_qc_b), (6.0, 70.0, 70.0));
        }
    }

    #[test]
    fn invalid_mode_reports_line() {
        let text = MINIMAL.replace("anharmonicity = -285", "anharmonicity = 285");
        let err = parse_device(&text, "dev.toml").unwrap_err();
        match err {
            Error::Validation { line, message, .. } => {
                assert_eq!(line, 8, "{message}");
                assert!(message.contains("anharmonicity"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unit_mismatch_is_caught() {
        // the coupler sweetspot above is in MHz while the file declares GHz
        let g = parse_device(MINIMAL, "dev.toml").unwrap().graph;
        assert_eq!(g.mode("C").unwrap().f_sweetspot, 6275.0);
        let text = MINIMAL.replace("frequency = \"GHz\"", "frequency = \"THz\"");
        assert!(matches!(
            parse_device(&text, "dev.toml"),
            Err(Error::Validation { line: 2, .. })
        ));
    }

    #[test]
    fn dangling_edge_reports_line() {
        let text = format!("{MINIMAL}\n[[edge]]\nqubit_a = \"Q1\"\nqubit_b = \"Q9\"\ncoupler = \"C\"\ng_qq = 6\ng_qc = 70\n");
        let err = parse_device(&text, "dev.toml").unwrap_err();
        assert!(matches!(err, Error::Validation { line: 20, .. }), "{err:?}");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = MINIMAL
            .replace("n_levels", "x")
            .replace("kind = \"coupler\"", "kind = \"coupler\"\nfreq = 1");
        assert!(parse_device(&text, "dev.toml").unwrap_err().is_validation());
    }

    #[test]
    fn partial_coherence_times_rejected() {
        let text = MINIMAL.replace("anharmonicity = -285", "anharmonicity = -285\nt1 = 30");
        assert!(parse_device(&text, "dev.toml").is_err());
    }
}
