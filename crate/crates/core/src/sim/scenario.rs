//! Scenario files.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! law = "meb"                 # or "meo"
//! max_rounds = 2000           # optional
//!
//! [network]
//! n = 32
//! d = 2
//! r_cmm = 3.0
//! r_ctr = 0.1
//! edge_map = "disk"           # optional: disk | cube | complete
//! input_set = "ball_bound"    # optional: ball_bound | cube_bound
//! rendezvous_tol = 1e-6       # optional
//! detector_rounds = 31        # optional, defaults to n - 1
//!
//! [initial]
//! kind = "uniform"            # or "explicit" with `positions = [[x, y], ...]`,
//!                             # or "line" with `spacing = 1.0`
//! lo = [-6.0, -3.0]
//! hi = [6.0, 3.0]
//! seed = 7
//! ```
//!
//! `edge_map` and `input_set` default to the law's natural pairing (disk and
//! ball bound for `meb`, cube and cube bound for `meo`). `r_cmm` and `r_ctr`
//! have no defaults.
//!
//! Uniform positions come from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded
//! with `seed_from_u64(seed)`. Coordinates are drawn agent by agent, axis by
//! axis; each uses one `next_u64()` output `w` as
//! `lo + (hi - lo) * (w >> 11) * 2^-53`.

use std::path::Path;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::control::LawVariant;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::netcore::{EdgeMap, InputSet, NetworkConfig};

pub const DEFAULT_RENDEZVOUS_TOL: f64 = 1e-6;

/// Axis-aligned sampling region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Rectangle {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let r = Rectangle { lo, hi };
        r.validate("rectangle")?;
        Ok(r)
    }

    fn validate(&self, field: &str) -> Result<()> {
        if self.lo.len() != self.hi.len() {
            return Err(Error::Scenario(format!(
                "{field}: lo has {} coordinates but hi has {}",
                self.lo.len(),
                self.hi.len()
            )));
        }
        for (a, (l, h)) in self.lo.iter().zip(&self.hi).enumerate() {
            if !(l < h) || !l.is_finite() || !h.is_finite() {
                return Err(Error::Scenario(format!(
                    "{field}: axis {a} needs finite lo < hi, got [{l}, {h}]"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialPositions {
    Explicit { positions: Vec<Point> },
    Uniform { lo: Vec<f64>, hi: Vec<f64>, seed: u64 },
    /// Agent `i` at `i * spacing` on the first axis.
    Line { spacing: f64 },
}

/// A validated run description.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub law: LawVariant,
    pub network: NetworkConfig,
    pub initial: InitialPositions,
    pub max_rounds: Option<usize>,
    pub detector_rounds: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkSection {
    n: usize,
    d: usize,
    r_cmm: f64,
    r_ctr: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edge_map: Option<EdgeMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input_set: Option<InputSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rendezvous_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    detector_rounds: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    law: LawVariant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_rounds: Option<usize>,
    network: NetworkSection,
    initial: InitialPositions,
}

/// `n` points uniform over `rect`; see the module docs for the generator.
pub fn generate_positions(rect: &Rectangle, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (1u64 << 53) as f64;
    (0..n)
        .map(|_| {
            Point::new(
                rect.lo
                    .iter()
                    .zip(&rect.hi)
                    .map(|(lo, hi)| {
                        let u = (rng.next_u64() >> 11) as f64 * scale;
                        lo + (hi - lo) * u
                    })
                    .collect(),
            )
        })
        .collect()
}

impl Scenario {
    /// Builds a scenario with the law's default pairing and tolerance.
    pub fn new(
        law: LawVariant,
        n: usize,
        d: usize,
        r_cmm: f64,
        r_ctr: f64,
        initial: InitialPositions,
    ) -> Result<Self> {
        let (edge_map, input_set) = law.default_pairing();
        let s = Scenario {
            law,
            network: NetworkConfig {
                n,
                d,
                r_cmm,
                r_ctr,
                edge_map,
                input_set,
                rendezvous_tol: DEFAULT_RENDEZVOUS_TOL,
            },
            initial,
            max_rounds: None,
            detector_rounds: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.network
            .validate()
            .map_err(|e| Error::Scenario(format!("network.{}", e.to_string().trim_start_matches("invalid parameter "))))?;
        let (n, d) = (self.network.n, self.network.d);
        match &self.initial {
            InitialPositions::Explicit { positions } => {
                if positions.len() != n {
                    return Err(Error::Scenario(format!(
                        "initial.positions: expected {n} agents, found {}",
                        positions.len()
                    )));
                }
                for (i, p) in positions.iter().enumerate() {
                    if p.dim() != d {
                        return Err(Error::Scenario(format!(
                            "initial.positions[{i}]: expected {d} coordinates, found {}",
                            p.dim()
                        )));
                    }
                    if !p.is_finite() {
                        return Err(Error::Scenario(format!(
                            "initial.positions[{i}]: coordinates must be finite"
                        )));
                    }
                }
            }
            InitialPositions::Uniform { lo, hi, .. } => {
                let rect = Rectangle {
                    lo: lo.clone(),
                    hi: hi.clone(),
                };
                rect.validate("initial")?;
                if rect.dim() != d {
                    return Err(Error::Scenario(format!(
                        "initial: rectangle has {} axes but network.d = {d}",
                        rect.dim()
                    )));
                }
            }
            InitialPositions::Line { spacing } => {
                if !(*spacing > 0.0) || !spacing.is_finite() {
                    return Err(Error::Scenario(format!(
                        "initial.spacing: must be positive, got {spacing}"
                    )));
                }
            }
        }
        if self.max_rounds == Some(0) {
            return Err(Error::Scenario("max_rounds: must be at least 1".into()));
        }
        if self.detector_rounds == Some(0) {
            return Err(Error::Scenario("network.detector_rounds: must be at least 1".into()));
        }
        Ok(())
    }

    pub fn positions(&self) -> Vec<Point> {
        match &self.initial {
            InitialPositions::Explicit { positions } => positions.clone(),
            InitialPositions::Uniform { lo, hi, seed } => generate_positions(
                &Rectangle {
                    lo: lo.clone(),
                    hi: hi.clone(),
                },
                self.network.n,
                *seed,
            ),
            InitialPositions::Line { spacing } => (0..self.network.n)
                .map(|i| {
                    let mut c = vec![0.0; self.network.d];
                    c[0] = i as f64 * spacing;
                    Point::new(c)
                })
                .collect(),
        }
    }

    /// Replaces the generator seed; no effect on explicit positions.
    pub fn with_seed(mut self, seed: u64) -> Self {
        if let InitialPositions::Uniform { seed: s, .. } = &mut self.initial {
            *s = seed;
        }
        self
    }

    pub fn to_toml(&self) -> Result<String> {
        let file = ScenarioFile {
            law: self.law,
            max_rounds: self.max_rounds,
            network: NetworkSection {
                n: self.network.n,
                d: self.network.d,
                r_cmm: self.network.r_cmm,
                r_ctr: self.network.r_ctr,
                edge_map: Some(self.network.edge_map),
                input_set: Some(self.network.input_set),
                rendezvous_tol: Some(self.network.rendezvous_tol),
                detector_rounds: self.detector_rounds,
            },
            initial: self.initial.clone(),
        };
        toml::to_string(&file).map_err(|e| Error::Scenario(e.to_string()))
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
    let (edge_map, input_set) = file.law.default_pairing();
    let scenario = Scenario {
        law: file.law,
        network: NetworkConfig {
            n: file.network.n,
            d: file.network.d,
            r_cmm: file.network.r_cmm,
            r_ctr: file.network.r_ctr,
            edge_map: file.network.edge_map.unwrap_or(edge_map),
            input_set: file.network.input_set.unwrap_or(input_set),
            rendezvous_tol: file.network.rendezvous_tol.unwrap_or(DEFAULT_RENDEZVOUS_TOL),
        },
        initial: file.initial,
        max_rounds: file.max_rounds,
        detector_rounds: file.network.detector_rounds,
    };
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_scenario(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
law = "meb"

[network]
n = 4
d = 2
r_cmm = 3.0
r_ctr = 0.1

[initial]
kind = "uniform"
lo = [-6.0, -3.0]
hi = [6.0, 3.0]
seed = 11
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.network.edge_map, EdgeMap::Disk);
        assert_eq!(s.network.input_set, InputSet::BallBound);
        assert_eq!(s.network.rendezvous_tol, DEFAULT_RENDEZVOUS_TOL);
        assert_eq!(s.max_rounds, None);
        assert_eq!(s.positions().len(), 4);
    }

    #[test]
    fn explicit_positions_of_wrong_dimension_name_the_agent() {
        let text = r#"
law = "meo"
[network]
n = 3
d = 2
r_cmm = 1.0
r_ctr = 0.1
[initial]
kind = "explicit"
positions = [[0.0, 0.0], [1.0, 0.0], [1.0, 2.0, 3.0]]
"#;
        let err = parse_scenario(text).unwrap_err().to_string();
        assert!(err.contains("initial.positions[2]"), "{err}");
        assert!(err.contains("expected 2 coordinates, found 3"), "{err}");
    }

    #[test]
    fn missing_radii_and_bad_rectangles_are_rejected() {
        let no_ctr = MINIMAL.replace("r_ctr = 0.1\n", "");
        assert!(parse_scenario(&no_ctr).unwrap_err().to_string().contains("r_ctr"));
        let flipped = MINIMAL.replace("lo = [-6.0, -3.0]", "lo = [6.0, -3.0]");
        let err = parse_scenario(&flipped).unwrap_err().to_string();
        assert!(err.contains("axis 0"), "{err}");
        let negative = MINIMAL.replace("r_cmm = 3.0", "r_cmm = -3.0");
        assert!(parse_scenario(&negative).unwrap_err().to_string().contains("r_cmm"));
        let unknown = MINIMAL.replace("law = \"meb\"", "law = \"meb\"\ncolour = 1");
        assert!(parse_scenario(&unknown).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let s = parse_scenario(MINIMAL).unwrap();
        let again = parse_scenario(&s.to_toml().unwrap()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn generator_is_reproducible_and_in_bounds() {
        let rect = Rectangle::new(vec![-6.0, -3.0], vec![6.0, 3.0]).unwrap();
        let a = generate_positions(&rect, 50, 3);
        assert_eq!(a, generate_positions(&rect, 50, 3));
        assert_ne!(a, generate_positions(&rect, 50, 4));
        for p in &a {
            assert!((-6.0..6.0).contains(&p[0]) && (-3.0..3.0).contains(&p[1]));
        }
        let one = generate_positions(&rect, 1, 0);
        assert_eq!(one.len(), 1);
    }
}
