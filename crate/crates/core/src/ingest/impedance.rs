//! Impedance networks: series R or R–C branches between nodes, a uniform
//! shunt inductance to ground, and an operating angular frequency.
//!
//! Branch admittance at frequency ω is `y = 1/(R + 1/(jωC))` in siemens
//! (`1/R` for a pure resistance). The shunt inductance does not enter the
//! Laplacian; it is returned separately as the time constant of the
//! pseudoinverse flow.

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::netmodel::ComplexGraph;
use crate::numkernel::{c, Scalar};

pub const IMPEDANCE_SCHEMA: &str = "lapflow-impedance/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpedanceBranch {
    pub from: usize,
    pub to: usize,
    /// Series resistance, ohms.
    pub resistance: f64,
    /// Series capacitance, farads; absent for a pure-R branch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacitance: Option<f64>,
}

/// Impedance network description, schema `lapflow-impedance/1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpedanceSpec {
    #[serde(default = "default_schema")]
    pub schema: String,
    /// Node count; defaults to the largest branch endpoint plus one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub branches: Vec<ImpedanceBranch>,
    /// Uniform shunt inductance ℒ_ind, henries.
    pub shunt_inductance: f64,
    /// Angular frequency ω, rad/s. Required to be positive whenever any
    /// branch carries a capacitance.
    #[serde(default = "default_omega")]
    pub omega: f64,
}

fn default_schema() -> String {
    IMPEDANCE_SCHEMA.to_string()
}

fn default_omega() -> f64 {
    1.0
}

impl ImpedanceSpec {
    fn validate(&self) -> Result<(), IngestError> {
        if self.schema != IMPEDANCE_SCHEMA {
            return Err(IngestError::Schema(format!(
                "unsupported schema `{}`, expected `{IMPEDANCE_SCHEMA}`",
                self.schema
            )));
        }
        if !(self.shunt_inductance > 0.0) || !self.shunt_inductance.is_finite() {
            return Err(IngestError::InvalidImpedance(format!(
                "shunt_inductance must be positive, got {}",
                self.shunt_inductance
            )));
        }
        let any_capacitance = self.branches.iter().any(|b| b.capacitance.is_some());
        if any_capacitance && (!(self.omega > 0.0) || !self.omega.is_finite()) {
            return Err(IngestError::InvalidImpedance(format!(
                "omega must be positive when capacitances are present, got {}",
                self.omega
            )));
        }
        for b in &self.branches {
            if !(b.resistance >= 0.0) || !b.resistance.is_finite() {
                return Err(IngestError::InvalidImpedance(format!(
                    "branch {}-{} has invalid resistance {}",
                    b.from, b.to, b.resistance
                )));
            }
            if let Some(cap) = b.capacitance {
                if !(cap > 0.0) || !cap.is_finite() {
                    return Err(IngestError::InvalidImpedance(format!(
                        "branch {}-{} has invalid capacitance {cap}",
                        b.from, b.to
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn parse_impedance_json(text: &str) -> Result<ImpedanceSpec, IngestError> {
    let spec: ImpedanceSpec = serde_json::from_str(text)?;
    spec.validate()?;
    Ok(spec)
}

/// Builds the admittance graph and returns it together with ℒ_ind.
pub fn impedance_to_graph(spec: &ImpedanceSpec) -> Result<(ComplexGraph, f64), IngestError> {
    spec.validate()?;
    let implied_n = spec
        .branches
        .iter()
        .map(|b| b.from.max(b.to) + 1)
        .max()
        .unwrap_or(0);
    let n = match spec.n {
        Some(n) if n >= implied_n => n,
        Some(n) => {
            return Err(IngestError::InvalidImpedance(format!(
                "n = {n} is smaller than the largest branch endpoint ({})",
                implied_n - 1
            )));
        }
        None => implied_n,
    };
    let mut weights = std::collections::BTreeMap::<(usize, usize), Scalar>::new();
    for b in &spec.branches {
        let z = match b.capacitance {
            // series R–C at frequency ω: Z = R − j/(ωC)
            Some(cap) => c(b.resistance, -1.0 / (spec.omega * cap)),
            None => c(b.resistance, 0.0),
        };
        if z.norm() == 0.0 {
            return Err(IngestError::ZeroImpedance {
                from: b.from as i64,
                to: b.to as i64,
            });
        }
        let y = c(1.0, 0.0) / z;
        let key = (b.from.min(b.to), b.from.max(b.to));
        *weights.entry(key).or_insert(c(0.0, 0.0)) += y;
    }
    let edges: Vec<(usize, usize, Scalar)> = weights
        .into_iter()
        .filter(|(_, w)| *w != c(0.0, 0.0))
        .map(|((a, b), w)| (a, b, w))
        .collect();
    let graph = ComplexGraph::new(n, false, &edges, None)?;
    Ok((graph, spec.shunt_inductance))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(branches: Vec<ImpedanceBranch>, omega: f64) -> ImpedanceSpec {
        ImpedanceSpec {
            schema: IMPEDANCE_SCHEMA.to_string(),
            n: None,
            branches,
            shunt_inductance: 1.0,
            omega,
        }
    }

    #[test]
    fn pure_resistance_weight() {
        let s = spec(
            vec![ImpedanceBranch {
                from: 0,
                to: 1,
                resistance: 1.0,
                capacitance: None,
            }],
            1.0,
        );
        let (g, l_ind) = impedance_to_graph(&s).unwrap();
        assert_eq!(l_ind, 1.0);
        assert!((g.edges()[0].weight - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pure_capacitance_weight() {
        // R=0, C=1, ω=1: Z = -j, y = 1/(-j) = j
        let s = spec(
            vec![ImpedanceBranch {
                from: 0,
                to: 1,
                resistance: 0.0,
                capacitance: Some(1.0),
            }],
            1.0,
        );
        let (g, _) = impedance_to_graph(&s).unwrap();
        assert!((g.edges()[0].weight - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn series_rc_weight() {
        // R=1, C=1, ω=1: Z = 1 - j, y = 0.5 + 0.5j
        let s = spec(
            vec![ImpedanceBranch {
                from: 0,
                to: 1,
                resistance: 1.0,
                capacitance: Some(1.0),
            }],
            1.0,
        );
        let (g, _) = impedance_to_graph(&s).unwrap();
        assert!((g.edges()[0].weight - c(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn zero_impedance_rejected() {
        let s = spec(
            vec![ImpedanceBranch {
                from: 0,
                to: 1,
                resistance: 0.0,
                capacitance: None,
            }],
            1.0,
        );
        assert!(matches!(
            impedance_to_graph(&s),
            Err(IngestError::ZeroImpedance { .. })
        ));
    }

    #[test]
    fn invariants_validated() {
        let mut s = spec(vec![], 1.0);
        s.shunt_inductance = 0.0;
        assert!(matches!(
            impedance_to_graph(&s),
            Err(IngestError::InvalidImpedance(_))
        ));

        let s2 = ImpedanceSpec {
            omega: -1.0,
            ..spec(
                vec![ImpedanceBranch {
                    from: 0,
                    to: 1,
                    resistance: 0.0,
                    capacitance: Some(2.0),
                }],
                1.0,
            )
        };
        assert!(matches!(
            impedance_to_graph(&s2),
            Err(IngestError::InvalidImpedance(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{
            "n": 3,
            "omega": 100.0,
            "shunt_inductance": 0.5,
            "branches": [
                {"from": 0, "to": 1, "resistance": 1.0},
                {"from": 1, "to": 2, "resistance": 2.0, "capacitance": 0.001}
            ]
        }"#;
        let s = parse_impedance_json(text).unwrap();
        assert_eq!(s.n, Some(3));
        let (g, l_ind) = impedance_to_graph(&s).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(l_ind, 0.5);
        let back: ImpedanceSpec =
            serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back.branches.len(), 2);
    }
}
