//! The two families of stable manifolds built from blocks by sums and self-sums:
//!
//! * `X_{n,l} = #n (S^2 x S^2) # l (S^1 x S^3)`
//! * `Xhat_{n,m,l} = #n CP^2 # m CP^2bar # l (S^1 x S^3)`
//!
//! with the empty chain read as `S^4`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::divisor::EdgeId;
use crate::par;
use crate::surgery::{self, ManifoldState, SumPairing, SurgeryError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FamilyKind {
    X,
    #[serde(rename = "XHAT")]
    Xhat,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::X => "X",
            FamilyKind::Xhat => "XHAT",
        })
    }
}

impl FromStr for FamilyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "X" => Ok(FamilyKind::X),
            "XHAT" => Ok(FamilyKind::Xhat),
            _ => Err(format!("unknown family kind {s:?}, expected X or XHAT")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub n: u32,
    /// Number of `CP^2bar` summands; ignored for [`FamilyKind::X`].
    pub m: u32,
    pub l: u32,
}

impl FamilySpec {
    pub fn x(n: u32, l: u32) -> Self {
        FamilySpec { kind: FamilyKind::X, n, m: 0, l }
    }

    pub fn xhat(n: u32, m: u32, l: u32) -> Self {
        FamilySpec { kind: FamilyKind::Xhat, n, m, l }
    }

    fn m(&self) -> i64 {
        match self.kind {
            FamilyKind::X => 0,
            FamilyKind::Xhat => self.m as i64,
        }
    }

    pub fn euler(&self) -> i64 {
        let (n, l) = (self.n as i64, self.l as i64);
        match self.kind {
            FamilyKind::X => 2 + 2 * n - 2 * l,
            FamilyKind::Xhat => 2 + n + self.m() - 2 * l,
        }
    }

    pub fn b1(&self) -> i64 {
        self.l as i64
    }

    pub fn b2plus(&self) -> i64 {
        self.n as i64
    }

    pub fn b2minus(&self) -> i64 {
        match self.kind {
            FamilyKind::X => self.n as i64,
            FamilyKind::Xhat => self.m(),
        }
    }

    /// Crossings of the block chain before any self-sum.
    pub fn chain_points(&self) -> usize {
        match self.kind {
            FamilyKind::X if self.n == 0 => 2,
            FamilyKind::X => 2 * self.n as usize + 2,
            FamilyKind::Xhat => self.n as usize + self.m() as usize + 2,
        }
    }

    /// Parity predicted for the finished construction, `(-1)^(n - 1 + l)`.
    pub fn predicted_parity(&self) -> crate::Sign {
        crate::Sign::pow_minus_one(self.n as i64 - 1 + self.l as i64)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FamilyKind::X => write!(f, "X_{{{},{}}}", self.n, self.l),
            FamilyKind::Xhat => write!(f, "XHAT_{{{},{},{}}}", self.n, self.m, self.l),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("{requested} self-sums requested but the chain has {points} crossings, enough for {budget}")]
    BudgetExceeded { requested: u32, points: usize, budget: usize },
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
}

/// Builds the canonical representative: blocks chained by straight sums at the
/// lowest crossing on each side, then `l` self-sums at the two lowest
/// remaining crossings.
pub fn build_family(spec: &FamilySpec) -> Result<ManifoldState, FamilyError> {
    let points = spec.chain_points();
    let budget = points / 2;
    if spec.l as usize > budget {
        return Err(FamilyError::BudgetExceeded { requested: spec.l, points, budget });
    }
    let blocks: Vec<fn() -> ManifoldState> = match spec.kind {
        FamilyKind::X => vec![surgery::block_s2xs2 as fn() -> ManifoldState; spec.n as usize],
        FamilyKind::Xhat => {
            let mut blocks = vec![surgery::block_cp2 as fn() -> ManifoldState; spec.n as usize];
            blocks.extend(std::iter::repeat_n(surgery::block_cp2bar as fn() -> ManifoldState, spec.m() as usize));
            blocks
        }
    };
    let mut state = match blocks.first() {
        Some(first) => first(),
        None => surgery::block_s4(),
    };
    for next in blocks.iter().skip(1) {
        state = surgery::connected_sum(&state, EdgeId(1), &next(), EdgeId(1), SumPairing::Straight)?;
    }
    debug_assert_eq!(state.graph.crossing_count(), points);
    for _ in 0..spec.l {
        state = self_sum_keeping_components(&state)?;
    }
    state.label = spec.to_string();
    Ok(state)
}

/// Self-sum at the two lowest crossings, preferring the pairing that does not
/// split a necklace.
fn self_sum_keeping_components(state: &ManifoldState) -> Result<ManifoldState, SurgeryError> {
    let before = state.graph.components().len();
    let straight = surgery::self_connected_sum(state, EdgeId(1), EdgeId(2), SumPairing::Straight)?;
    if straight.graph.components().len() <= before {
        return Ok(straight);
    }
    let swapped = surgery::self_connected_sum(state, EdgeId(1), EdgeId(2), SumPairing::Swapped)?;
    if swapped.graph.components().len() <= before {
        Ok(swapped)
    } else {
        Ok(straight)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictReason {
    Admissible,
    /// `1 - b1 + b2+` is odd, so there is not even an almost complex structure.
    NoAlmostComplexStructure,
    /// Negative Euler characteristic: outside the reach of the construction, not
    /// known to be impossible.
    ConstructionUnavailable,
}

impl fmt::Display for VerdictReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictReason::Admissible => "admissible",
            VerdictReason::NoAlmostComplexStructure => "no almost complex structure",
            VerdictReason::ConstructionUnavailable => "construction unavailable",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub admissible: bool,
    pub reason: VerdictReason,
}

/// Closed-form verdict: a stable structure is constructed when `1 - b1 + b2+`
/// is even and the Euler characteristic is nonnegative.
pub fn theorem_verdict(spec: &FamilySpec) -> Verdict {
    let odd = (1 - spec.b1() + spec.b2plus()).rem_euclid(2) == 1;
    let reason = if odd {
        VerdictReason::NoAlmostComplexStructure
    } else if spec.euler() < 0 {
        VerdictReason::ConstructionUnavailable
    } else {
        VerdictReason::Admissible
    };
    Verdict { admissible: reason == VerdictReason::Admissible, reason }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub spec: FamilySpec,
    pub verdict: Verdict,
    pub built: Result<ManifoldState, FamilyError>,
}

impl SweepRow {
    /// Engine and closed form agree (vacuously when the build is refused).
    pub fn agrees(&self) -> bool {
        match &self.built {
            Ok(state) => state.stable() == self.verdict.admissible,
            Err(FamilyError::BudgetExceeded { .. }) => !self.verdict.admissible,
            Err(_) => false,
        }
    }
}

/// Every spec with `n + m <= max_blocks` and `l <= max_l`, both kinds.
pub fn sweep_specs(max_blocks: u32, max_l: u32) -> Vec<FamilySpec> {
    let mut specs = Vec::new();
    for l in 0..=max_l {
        for n in 0..=max_blocks {
            specs.push(FamilySpec::x(n, l));
            for m in 0..=max_blocks - n {
                specs.push(FamilySpec::xhat(n, m, l));
            }
        }
    }
    specs
}

fn row(spec: &FamilySpec) -> SweepRow {
    SweepRow { spec: *spec, verdict: theorem_verdict(spec), built: build_family(spec) }
}

/// Builds every spec, in parallel when the `parallel` feature is on.
pub fn sweep(specs: &[FamilySpec]) -> Vec<SweepRow> {
    par::map(specs, row)
}

pub fn sweep_sequential(specs: &[FamilySpec]) -> Vec<SweepRow> {
    par::map_sequential(specs, row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Sign;

    #[test]
    fn x21_is_stable() {
        let state = build_family(&FamilySpec::x(2, 1)).unwrap();
        assert!(state.stable());
        assert_eq!(state.euler, 4);
        assert_eq!(state.total_parity(), Sign::Plus);
    }

    #[test]
    fn xhat100_is_cp2() {
        let state = build_family(&FamilySpec::xhat(1, 0, 0)).unwrap();
        assert!(state.stable());
        assert_eq!(state.graph, surgery::block_cp2().graph);
    }

    #[test]
    fn budget_error() {
        assert_eq!(
            build_family(&FamilySpec::x(1, 3)),
            Err(FamilyError::BudgetExceeded { requested: 3, points: 4, budget: 2 })
        );
        assert!(build_family(&FamilySpec::x(0, 1)).is_ok());
        assert!(build_family(&FamilySpec::x(0, 2)).is_err());
    }

    #[test]
    fn verdicts() {
        assert!(theorem_verdict(&FamilySpec::x(1, 0)).admissible);
        assert_eq!(theorem_verdict(&FamilySpec::x(1, 1)).reason, VerdictReason::NoAlmostComplexStructure);
        assert!(theorem_verdict(&FamilySpec::xhat(2, 3, 1)).admissible);
        assert_eq!(FamilySpec::xhat(2, 3, 1).euler(), 5);
        assert_eq!(theorem_verdict(&FamilySpec::x(1, 4)).reason, VerdictReason::ConstructionUnavailable);
    }

    #[test]
    fn closed_forms_match_engine() {
        for spec in sweep_specs(4, 4) {
            if let Ok(state) = build_family(&spec) {
                assert_eq!(
                    (state.euler, state.b1, state.b2plus, state.b2minus),
                    (spec.euler(), spec.b1(), spec.b2plus(), spec.b2minus()),
                    "{spec}"
                );
            }
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let specs = sweep_specs(3, 3);
        assert_eq!(sweep(&specs), sweep_sequential(&specs));
    }

    #[test]
    fn kind_parses() {
        assert_eq!("xhat".parse::<FamilyKind>(), Ok(FamilyKind::Xhat));
        assert!("Y".parse::<FamilyKind>().is_err());
    }
}
