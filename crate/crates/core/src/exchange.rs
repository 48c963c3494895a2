//! JSON exchange documents for forms, point classifications and states.
//!
//! Rationals are always `"p/q"` strings; signs are `1`, `-1` or `null`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chart::{self, Branch, ChartError, ChartFrame, EllipticForm, Generator, PointClass};
use crate::divisor::DivisorGraph;
use crate::report::{self, InvariantsReport};
use crate::scalar::{self, Rational};
use crate::sign::Sign;
use crate::surgery::ManifoldState;

#[derive(Debug, Error)]
pub enum ExchangeError {
    #[error("malformed document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("bad generator {0:?}")]
    Generator(String),
    #[error("bad rational: {0}")]
    Rational(String),
    #[error(transparent)]
    Chart(#[from] ChartError),
}

impl ExchangeError {
    /// True for errors in the document itself, false for well-formed input the
    /// calculus rejects.
    pub fn is_parse_error(&self) -> bool {
        !matches!(self, ExchangeError::Chart(ChartError::UnsupportedChart { .. } | ChartError::NotReal))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDocument {
    pub generators: Vec<String>,
    pub re: String,
    #[serde(default = "zero_text")]
    pub im: String,
}

fn zero_text() -> String {
    "0/1".to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormDocument {
    pub k: usize,
    pub m: usize,
    pub degree: usize,
    pub terms: Vec<TermDocument>,
}

impl FormDocument {
    pub fn parse(text: &str) -> Result<FormDocument, ExchangeError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_form(&self) -> Result<EllipticForm, ExchangeError> {
        let frame = ChartFrame::new(self.k, self.m);
        let rational = |s: &str| scalar::parse_rational(s).map_err(|e| ExchangeError::Rational(e.to_string()));
        let mut terms = Vec::with_capacity(self.terms.len());
        let mut seen = std::collections::HashSet::new();
        for term in &self.terms {
            let generators = term
                .generators
                .iter()
                .map(|g| g.parse::<Generator>().map_err(|_| ExchangeError::Generator(g.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            if !seen.insert(generators.clone()) {
                return Err(ExchangeError::Chart(ChartError::UnorderedGenerators(format!(
                    "term {} repeated",
                    term.generators.join(",")
                ))));
            }
            terms.push((generators, scalar::complex(rational(&term.re)?, rational(&term.im)?)));
        }
        Ok(EllipticForm::from_terms(frame, self.degree, terms)?)
    }

    pub fn from_form(form: &EllipticForm) -> FormDocument {
        let frame = form.frame();
        FormDocument {
            k: frame.k,
            m: frame.m,
            degree: form.degree(),
            terms: form
                .terms()
                .map(|(generators, value)| TermDocument {
                    generators: generators.iter().map(|g| g.to_string()).collect(),
                    re: scalar::format_rational(&value.re),
                    im: scalar::format_rational(&value.im),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexDocument {
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointClassDocument {
    pub nondegenerate: bool,
    pub elliptic_residues: Vec<ComplexDocument>,
    pub in_im_image: bool,
    pub locally_complex: bool,
    pub branch: Branch,
    pub index: Option<Sign>,
    pub imaginary_parameter: bool,
    pub lambda1: Option<String>,
    pub lambda2: Option<String>,
    pub param_modulus: Option<String>,
}

impl From<&PointClass> for PointClassDocument {
    fn from(class: &PointClass) -> Self {
        let text = |r: &Option<Rational>| r.as_ref().map(scalar::format_rational);
        PointClassDocument {
            nondegenerate: class.nondegenerate,
            elliptic_residues: class
                .elliptic_residues
                .iter()
                .map(|z| ComplexDocument { re: scalar::format_rational(&z.re), im: scalar::format_rational(&z.im) })
                .collect(),
            in_im_image: class.in_im_image,
            locally_complex: class.locally_complex,
            branch: class.branch,
            index: class.index,
            imaginary_parameter: class.imaginary_parameter,
            lambda1: text(&class.lambda1),
            lambda2: text(&class.lambda2),
            param_modulus: text(&class.param_modulus()),
        }
    }
}

/// Parses a form document and classifies it.
pub fn classify_document(text: &str) -> Result<PointClassDocument, ExchangeError> {
    let form = FormDocument::parse(text)?.to_form()?;
    let class = chart::classify_point(&form)?;
    Ok(PointClassDocument::from(&class))
}

/// A state as the graph document plus its invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateDocument {
    pub invariants: InvariantsReport,
    pub graph: DivisorGraph,
}

pub fn state_document(state: &ManifoldState) -> StateDocument {
    StateDocument { invariants: report::invariants_report(state), graph: state.graph.clone() }
}
