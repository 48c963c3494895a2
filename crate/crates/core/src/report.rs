//! Invariant reports for manifold states, as text or JSON.

use std::fmt::Write as _;

use serde::Serialize;

use crate::divisor::{ComponentKind, EdgeId};
use crate::scalar;
use crate::sign::Sign;
use crate::surgery::ManifoldState;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?}, expected text or json")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    #[serde(rename = "type")]
    pub kind: ComponentKind,
    /// Number of strands.
    pub length: usize,
    pub parity: Option<Sign>,
    pub coorientable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointReport {
    pub id: EdgeId,
    pub index: Option<Sign>,
    pub param_modulus: String,
    pub imaginary_parameter: bool,
}

/// Field order is the serialization order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantsReport {
    pub label: String,
    pub euler: i64,
    pub b1: i64,
    pub b2plus: i64,
    pub b2minus: i64,
    pub signature: i64,
    pub one_minus_b1_plus_b2plus: i64,
    pub almost_complex_obstruction: bool,
    pub components: Vec<ComponentReport>,
    pub stable: bool,
    pub locally_complex: bool,
    pub points: Vec<PointReport>,
}

pub fn invariants_report(state: &ManifoldState) -> InvariantsReport {
    let graph = &state.graph;
    let components = graph
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let id = crate::divisor::ComponentId(i);
            let parity = graph.parity(id).expect("listed component");
            ComponentReport {
                kind: graph.kind(id).expect("listed component"),
                length: c.vertices.len(),
                parity,
                coorientable: parity.is_some(),
            }
        })
        .collect();
    let points = graph
        .edges()
        .iter()
        .map(|e| PointReport {
            id: e.id,
            index: e.index,
            param_modulus: scalar::format_rational(&e.param_modulus),
            imaginary_parameter: e.imaginary_parameter,
        })
        .collect();
    InvariantsReport {
        label: state.label.clone(),
        euler: state.euler,
        b1: state.b1,
        b2plus: state.b2plus,
        b2minus: state.b2minus,
        signature: state.signature(),
        one_minus_b1_plus_b2plus: state.one_minus_b1_plus_b2plus(),
        almost_complex_obstruction: state.almost_complex_obstruction(),
        components,
        stable: state.stable(),
        locally_complex: state.locally_complex,
        points,
    }
}

fn sign_text(sign: Option<Sign>) -> String {
    sign.map_or_else(|| "undefined".to_string(), |s| s.to_string())
}

impl InvariantsReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "label: {}", self.label);
        let _ = writeln!(out, "euler: {}", self.euler);
        let _ = writeln!(out, "b1: {}", self.b1);
        let _ = writeln!(out, "b2plus: {}", self.b2plus);
        let _ = writeln!(out, "b2minus: {}", self.b2minus);
        let _ = writeln!(out, "signature: {}", self.signature);
        let _ = writeln!(out, "one_minus_b1_plus_b2plus: {}", self.one_minus_b1_plus_b2plus);
        let _ = writeln!(out, "almost_complex_obstruction: {}", self.almost_complex_obstruction);
        let _ = writeln!(out, "components:");
        for c in &self.components {
            let _ = writeln!(
                out,
                "  - {} length={} parity={} coorientable={}",
                c.kind,
                c.length,
                sign_text(c.parity),
                c.coorientable
            );
        }
        let _ = writeln!(out, "stable: {}", self.stable);
        let _ = writeln!(out, "locally_complex: {}", self.locally_complex);
        let _ = writeln!(out, "points:");
        for p in &self.points {
            let _ = writeln!(
                out,
                "  - {} index={} param_modulus={} imaginary_parameter={}",
                p.id,
                sign_text(p.index),
                p.param_modulus,
                p.imaginary_parameter
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn emit_report(state: &ManifoldState, format: Format) -> String {
    let report = invariants_report(state);
    match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    }
}
