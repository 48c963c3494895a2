//! Pointwise exterior algebra on the standard chart `R^{2k} x R^m`.
//!
//! Two frames are modelled. The elliptic frame has generators
//! `L1, T1, ..., Lk, Tk, X1, ..., Xm`, where `Li = dlog r_i`, `Ti = dtheta_i`
//! and `Xj = dx_j`. The complex log frame has generators `Z1, ..., Zk, X1, ..., Xm`
//! with `Zi = dlog z_i = Li + i Ti`. Forms are evaluated at a single point, so
//! every coefficient is an exact complex rational.
//!
//! Residues read off signed coefficients in the elliptic frame. At a crossing
//! point (`k = 2`, `m = 0`) the canonical order `(L1, T1, L2, T2)` is taken to
//! be positively oriented; intersection indices are reported relative to it.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::scalar::{self, Rational, Scalar};
use crate::sign::Sign;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChartError {
    #[error("frame mismatch: ({0}) vs ({1})")]
    FrameMismatch(ChartFrame, ChartFrame),
    #[error("expected a {expected}-form, got degree {actual}")]
    Degree { expected: usize, actual: usize },
    #[error("strand index {index} out of range 1..={k}")]
    IndexOutOfRange { index: usize, k: usize },
    #[error("two-index residue needs distinct strands, got {0} twice")]
    RepeatedIndex(usize),
    #[error("residue kind {0} needs a second strand index")]
    MissingIndex(ResidueKind),
    #[error("total dimension {0} is odd")]
    OddDimension(usize),
    #[error("point classification needs k = 2, m = 0 (got k = {k}, m = {m})")]
    UnsupportedChart { k: usize, m: usize },
    #[error("form has non-real coefficients")]
    NotReal,
    #[error("normal form parameters are both zero")]
    DegenerateParameters,
    #[error("spinor parameter must be nonzero")]
    ZeroSpinorParameter,
    #[error("generator {0} does not belong to frame ({1})")]
    UnknownGenerator(String, ChartFrame),
    #[error("generators must be strictly increasing in canonical order: {0}")]
    UnorderedGenerators(String),
    #[error("complex log forms have degree at most 2, got {0}")]
    LogDegree(usize),
}

/// Dimensions of the standard chart: `k` elliptic pairs and `m` smooth directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChartFrame {
    pub k: usize,
    pub m: usize,
}

impl ChartFrame {
    pub fn new(k: usize, m: usize) -> Self {
        ChartFrame { k, m }
    }

    /// The chart around a point of `D(2)` in a four-manifold.
    pub fn crossing() -> Self {
        ChartFrame { k: 2, m: 0 }
    }

    /// Number of elliptic-frame generators, `2k + m`.
    pub fn dim(&self) -> usize {
        2 * self.k + self.m
    }

    /// Number of complex log generators, `k + m`.
    pub fn log_dim(&self) -> usize {
        self.k + self.m
    }

    pub fn generators(&self) -> Vec<Generator> {
        (0..self.dim()).map(|i| self.generator(i)).collect()
    }

    pub fn generator(&self, position: usize) -> Generator {
        debug_assert!(position < self.dim());
        if position < 2 * self.k {
            if position.is_multiple_of(2) {
                Generator::Log(position / 2 + 1)
            } else {
                Generator::Angle(position / 2 + 1)
            }
        } else {
            Generator::Smooth(position - 2 * self.k + 1)
        }
    }

    pub fn position(&self, generator: Generator) -> Result<usize, ChartError> {
        let unknown = || ChartError::UnknownGenerator(generator.to_string(), *self);
        match generator {
            Generator::Log(i) if (1..=self.k).contains(&i) => Ok(2 * (i - 1)),
            Generator::Angle(i) if (1..=self.k).contains(&i) => Ok(2 * (i - 1) + 1),
            Generator::Smooth(j) if (1..=self.m).contains(&j) => Ok(2 * self.k + j - 1),
            _ => Err(unknown()),
        }
    }

    pub fn log_generator(&self, position: usize) -> LogGenerator {
        debug_assert!(position < self.log_dim());
        if position < self.k {
            LogGenerator::Log(position + 1)
        } else {
            LogGenerator::Smooth(position - self.k + 1)
        }
    }

    pub fn log_position(&self, generator: LogGenerator) -> Result<usize, ChartError> {
        match generator {
            LogGenerator::Log(i) if (1..=self.k).contains(&i) => Ok(i - 1),
            LogGenerator::Smooth(j) if (1..=self.m).contains(&j) => Ok(self.k + j - 1),
            _ => Err(ChartError::UnknownGenerator(generator.to_string(), *self)),
        }
    }

    fn check_strand(&self, index: usize) -> Result<(), ChartError> {
        if (1..=self.k).contains(&index) {
            Ok(())
        } else {
            Err(ChartError::IndexOutOfRange { index, k: self.k })
        }
    }
}

impl fmt::Display for ChartFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={}, m={}", self.k, self.m)
    }
}

/// Elliptic-frame generator; indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `dlog r_i`
    Log(usize),
    /// `dtheta_i`
    Angle(usize),
    /// `dx_j`
    Smooth(usize),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Log(i) => write!(f, "L{i}"),
            Generator::Angle(i) => write!(f, "T{i}"),
            Generator::Smooth(j) => write!(f, "X{j}"),
        }
    }
}

impl FromStr for Generator {
    type Err = ChartError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ChartError::UnknownGenerator(s.to_string(), ChartFrame::new(0, 0));
        let (head, tail) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        let index: usize = tail.parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        match head {
            "L" => Ok(Generator::Log(index)),
            "T" => Ok(Generator::Angle(index)),
            "X" => Ok(Generator::Smooth(index)),
            _ => Err(bad()),
        }
    }
}

/// Complex log frame generator; indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LogGenerator {
    /// `dlog z_i`
    Log(usize),
    /// `dx_j`
    Smooth(usize),
}

impl fmt::Display for LogGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogGenerator::Log(i) => write!(f, "Z{i}"),
            LogGenerator::Smooth(j) => write!(f, "X{j}"),
        }
    }
}

/// Sparse coefficients of a homogeneous form, keyed by strictly increasing
/// generator positions. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Terms {
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, Scalar>,
}

/// Sign of the permutation sorting `indices`, or `None` if an index repeats.
fn sort_sign(indices: &mut [usize]) -> Option<Sign> {
    let mut sign = Sign::Plus;
    // insertion sort, counting transpositions
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 && indices[j - 1] > indices[j] {
            indices.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

fn signed(value: Scalar, sign: Sign) -> Scalar {
    match sign {
        Sign::Plus => value,
        Sign::Minus => -value,
    }
}

impl Terms {
    fn zero(degree: usize) -> Self {
        Terms { degree, coeffs: BTreeMap::new() }
    }

    fn accumulate(&mut self, key: Vec<usize>, value: Scalar) {
        debug_assert_eq!(key.len(), self.degree);
        if value.is_zero() {
            return;
        }
        match self.coeffs.entry(key) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(value);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = slot.get() + value;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    /// Adds `value * e_{indices}` with `indices` in any order.
    fn accumulate_unsorted(&mut self, mut indices: Vec<usize>, value: Scalar) {
        if let Some(sign) = sort_sign(&mut indices) {
            self.accumulate(indices, signed(value, sign));
        }
    }

    /// Coefficient of `e_{indices}` with `indices` in any order.
    fn signed_coefficient(&self, indices: &[usize]) -> Scalar {
        let mut sorted = indices.to_vec();
        match sort_sign(&mut sorted) {
            Some(sign) => signed(self.coeffs.get(&sorted).cloned().unwrap_or_else(Scalar::zero), sign),
            None => Scalar::zero(),
        }
    }

    fn map_coeffs(&self, f: impl Fn(&Vec<usize>, &Scalar) -> Scalar) -> Terms {
        let mut out = Terms::zero(self.degree);
        for (key, value) in &self.coeffs {
            out.accumulate(key.clone(), f(key, value));
        }
        out
    }

    fn add(&self, other: &Terms) -> Terms {
        let mut out = self.clone();
        for (key, value) in &other.coeffs {
            out.accumulate(key.clone(), value.clone());
        }
        out
    }

    fn wedge(&self, other: &Terms) -> Terms {
        let mut out = Terms::zero(self.degree + other.degree);
        for (left, a) in &self.coeffs {
            for (right, b) in &other.coeffs {
                if right.iter().any(|r| left.binary_search(r).is_ok()) {
                    continue;
                }
                // both halves are sorted: the sign is (-1)^(#pairs out of order)
                let inversions: usize = left
                    .iter()
                    .map(|l| right.iter().filter(|r| *r < l).count())
                    .sum();
                let mut key = Vec::with_capacity(out.degree);
                key.extend_from_slice(left);
                key.extend_from_slice(right);
                key.sort_unstable();
                out.accumulate(key, signed(a * b, Sign::pow_minus_one(inversions as i64)));
            }
        }
        out
    }
}

/// A constant-coefficient form in the elliptic frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticForm {
    frame: ChartFrame,
    terms: Terms,
}

impl EllipticForm {
    pub fn zero(frame: ChartFrame, degree: usize) -> Self {
        EllipticForm { frame, terms: Terms::zero(degree) }
    }

    /// The constant function 1.
    pub fn one(frame: ChartFrame) -> Self {
        let mut terms = Terms::zero(0);
        terms.accumulate(Vec::new(), scalar::real(Rational::one()));
        EllipticForm { frame, terms }
    }

    /// `g_1 ^ ... ^ g_p` for generators in any order (repeats give zero).
    pub fn basis(frame: ChartFrame, generators: &[Generator]) -> Result<Self, ChartError> {
        let positions = generators
            .iter()
            .map(|g| frame.position(*g))
            .collect::<Result<Vec<_>, _>>()?;
        let mut terms = Terms::zero(positions.len());
        terms.accumulate_unsorted(positions, scalar::real(Rational::one()));
        Ok(EllipticForm { frame, terms })
    }

    /// Builds a form from `(generators, coefficient)` terms. Generators in each
    /// term must be strictly increasing in canonical order.
    pub fn from_terms<I>(frame: ChartFrame, degree: usize, terms: I) -> Result<Self, ChartError>
    where
        I: IntoIterator<Item = (Vec<Generator>, Scalar)>,
    {
        let mut out = Terms::zero(degree);
        for (generators, value) in terms {
            let positions = generators
                .iter()
                .map(|g| frame.position(*g))
                .collect::<Result<Vec<_>, _>>()?;
            if positions.len() != degree {
                return Err(ChartError::Degree { expected: degree, actual: positions.len() });
            }
            if positions.windows(2).any(|w| w[0] >= w[1]) {
                let names: Vec<String> = generators.iter().map(|g| g.to_string()).collect();
                return Err(ChartError::UnorderedGenerators(names.join(",")));
            }
            out.accumulate(positions, value);
        }
        Ok(EllipticForm { frame, terms: out })
    }

    pub fn frame(&self) -> ChartFrame {
        self.frame
    }

    pub fn degree(&self) -> usize {
        self.terms.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.coeffs.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.terms.coeffs.values().all(scalar::is_real)
    }

    /// Nonzero terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<Generator>, &Scalar)> + '_ {
        self.terms
            .coeffs
            .iter()
            .map(|(key, value)| (key.iter().map(|&p| self.frame.generator(p)).collect(), value))
    }

    /// Coefficient of `g_1 ^ ... ^ g_p`, with the permutation sign applied when
    /// the generators are not in canonical order.
    pub fn coefficient(&self, generators: &[Generator]) -> Result<Scalar, ChartError> {
        let positions = generators
            .iter()
            .map(|g| self.frame.position(*g))
            .collect::<Result<Vec<_>, _>>()?;
        if positions.len() != self.degree() {
            return Ok(Scalar::zero());
        }
        Ok(self.terms.signed_coefficient(&positions))
    }

    pub fn scale(&self, factor: &Scalar) -> Self {
        EllipticForm { frame: self.frame, terms: self.terms.map_coeffs(|_, v| v * factor) }
    }

    pub fn real_part(&self) -> Self {
        EllipticForm { frame: self.frame, terms: self.terms.map_coeffs(|_, v| scalar::real(v.re.clone())) }
    }

    pub fn imag_part(&self) -> Self {
        EllipticForm { frame: self.frame, terms: self.terms.map_coeffs(|_, v| scalar::real(v.im.clone())) }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ChartError> {
        self.check_compatible(other)?;
        if self.degree() != other.degree() && !self.is_zero() && !other.is_zero() {
            return Err(ChartError::Degree { expected: self.degree(), actual: other.degree() });
        }
        let degree = if self.is_zero() { other.degree() } else { self.degree() };
        let mut terms = self.terms.add(&other.terms);
        terms.degree = degree;
        Ok(EllipticForm { frame: self.frame, terms })
    }

    /// Exterior product; the frames must agree.
    pub fn wedge(&self, other: &Self) -> Result<Self, ChartError> {
        self.check_compatible(other)?;
        Ok(EllipticForm { frame: self.frame, terms: self.terms.wedge(&other.terms) })
    }

    fn check_compatible(&self, other: &Self) -> Result<(), ChartError> {
        if self.frame != other.frame {
            return Err(ChartError::FrameMismatch(self.frame, other.frame));
        }
        Ok(())
    }

    fn require_two_form(&self) -> Result<(), ChartError> {
        if self.degree() != 2 {
            return Err(ChartError::Degree { expected: 2, actual: self.degree() });
        }
        Ok(())
    }

    /// Top coefficient of `omega^n` on `(L1, T1, ..., Xm)`, where `2n` is the
    /// total dimension.
    pub fn top_power_coefficient(&self) -> Result<Scalar, ChartError> {
        self.require_two_form()?;
        let dim = self.frame.dim();
        if dim % 2 == 1 {
            return Err(ChartError::OddDimension(dim));
        }
        let mut power = EllipticForm::one(self.frame);
        for _ in 0..dim / 2 {
            power = power.wedge(self)?;
        }
        let top: Vec<usize> = (0..dim).collect();
        Ok(power.terms.signed_coefficient(&top))
    }

    /// Pfaffian of the antisymmetric coefficient matrix, `omega^n / n!`.
    pub fn pfaffian(&self) -> Result<Scalar, ChartError> {
        let top = self.top_power_coefficient()?;
        let n = self.frame.dim() / 2;
        let factorial: i64 = (1..=n as i64).product();
        Ok(top * scalar::real(scalar::int(1) / scalar::int(factorial)))
    }

    pub fn is_nondegenerate(&self) -> Result<bool, ChartError> {
        Ok(!self.top_power_coefficient()?.is_zero())
    }

    /// Negates every coefficient involving `T_i`: the effect of reversing the
    /// co-orientation of strand `i` on the angular generator.
    pub fn flip_strand(&self, strand: usize) -> Result<Self, ChartError> {
        self.frame.check_strand(strand)?;
        let angle = self.frame.position(Generator::Angle(strand))?;
        let terms = self
            .terms
            .map_coeffs(|key, v| if key.contains(&angle) { -v.clone() } else { v.clone() });
        Ok(EllipticForm { frame: self.frame, terms })
    }

    /// Residue of a 2-form at the origin of the chart.
    ///
    /// Two-index kinds read the signed coefficient of the ordered pair, e.g.
    /// `residue(RTheta, 1, Some(2))` is the coefficient of `L1 ^ T2`. The
    /// elliptic kind `Elliptic` reads the coefficient of `Li ^ Ti`.
    pub fn residue(&self, kind: ResidueKind, i: usize, j: Option<usize>) -> Result<Scalar, ChartError> {
        self.require_two_form()?;
        self.frame.check_strand(i)?;
        let (first, second) = match kind {
            ResidueKind::Elliptic => (Generator::Log(i), Generator::Angle(i)),
            _ => {
                let j = j.ok_or(ChartError::MissingIndex(kind))?;
                self.frame.check_strand(j)?;
                if i == j {
                    return Err(ChartError::RepeatedIndex(i));
                }
                match kind {
                    ResidueKind::RR => (Generator::Log(i), Generator::Log(j)),
                    ResidueKind::RTheta => (Generator::Log(i), Generator::Angle(j)),
                    ResidueKind::ThetaR => (Generator::Angle(i), Generator::Log(j)),
                    ResidueKind::ThetaTheta => (Generator::Angle(i), Generator::Angle(j)),
                    ResidueKind::Elliptic => unreachable!(),
                }
            }
        };
        self.coefficient(&[first, second])
    }

    /// Real residue at a crossing chart; callers guarantee `k >= 2`, degree 2.
    fn crossing_residue(&self, kind: ResidueKind, i: usize, j: usize) -> Rational {
        self.residue(kind, i, Some(j)).expect("validated crossing chart").re
    }

    /// Whether a real 2-form lies in the intersection of the residue kernels
    /// characterizing imaginary parts of complex log forms: vanishing elliptic
    /// residues, and for every pair `i < j` both
    /// `Res_{theta_i r_j} - Res_{r_i theta_j} = 0` and `Res_{r_i r_j} + Res_{theta_i theta_j} = 0`.
    pub fn in_im_kernels(&self) -> Result<bool, ChartError> {
        self.require_two_form()?;
        if !self.is_real() {
            return Ok(false);
        }
        let k = self.frame.k;
        for i in 1..=k {
            if !self.residue(ResidueKind::Elliptic, i, None)?.is_zero() {
                return Ok(false);
            }
        }
        for i in 1..=k {
            for j in (i + 1)..=k {
                if branch_of(self, i, j) != Branch::Condition1 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Which of the two local residue conditions holds at a pair of strands.
fn branch_of(form: &EllipticForm, i: usize, j: usize) -> Branch {
    let rr = form.crossing_residue(ResidueKind::RR, i, j);
    let rt = form.crossing_residue(ResidueKind::RTheta, i, j);
    let tr = form.crossing_residue(ResidueKind::ThetaR, i, j);
    let tt = form.crossing_residue(ResidueKind::ThetaTheta, i, j);
    if (&tr - &rt).is_zero() && (&rr + &tt).is_zero() {
        Branch::Condition1
    } else if (&tr + &rt).is_zero() && (&rr - &tt).is_zero() {
        Branch::Condition2
    } else {
        Branch::Neither
    }
}

impl Add for &EllipticForm {
    type Output = EllipticForm;

    /// Panics on frame or degree mismatch; use [`EllipticForm::try_add`] otherwise.
    fn add(self, rhs: &EllipticForm) -> EllipticForm {
        self.try_add(rhs).expect("incompatible forms")
    }
}

impl Sub for &EllipticForm {
    type Output = EllipticForm;

    fn sub(self, rhs: &EllipticForm) -> EllipticForm {
        self.try_add(&-rhs).expect("incompatible forms")
    }
}

impl Neg for &EllipticForm {
    type Output = EllipticForm;

    fn neg(self) -> EllipticForm {
        EllipticForm { frame: self.frame, terms: self.terms.map_coeffs(|_, v| -v.clone()) }
    }
}

impl Mul<&EllipticForm> for &Scalar {
    type Output = EllipticForm;

    fn mul(self, rhs: &EllipticForm) -> EllipticForm {
        rhs.scale(self)
    }
}

impl fmt::Display for EllipticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms().map(|(gens, v)| (gens.iter().map(|g| g.to_string()).collect(), v)))
    }
}

fn write_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (Vec<String>, &'a Scalar)>,
) -> fmt::Result {
    let mut empty = true;
    for (names, value) in terms {
        if !empty {
            f.write_str(" + ")?;
        }
        empty = false;
        let coefficient = if value.im.is_zero() {
            value.re.to_string()
        } else if value.re.is_zero() {
            format!("{}i", value.im)
        } else {
            format!("({} + {}i)", value.re, value.im)
        };
        if names.is_empty() {
            f.write_str(&coefficient)?;
        } else {
            write!(f, "{}*{}", coefficient, names.join("^"))?;
        }
    }
    if empty {
        f.write_str("0")?;
    }
    Ok(())
}

/// A constant-coefficient form of degree at most 2 in the complex log frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexLogForm {
    frame: ChartFrame,
    terms: Terms,
}

impl ComplexLogForm {
    pub fn zero(frame: ChartFrame, degree: usize) -> Result<Self, ChartError> {
        if degree > 2 {
            return Err(ChartError::LogDegree(degree));
        }
        Ok(ComplexLogForm { frame, terms: Terms::zero(degree) })
    }

    pub fn basis(frame: ChartFrame, generators: &[LogGenerator]) -> Result<Self, ChartError> {
        if generators.len() > 2 {
            return Err(ChartError::LogDegree(generators.len()));
        }
        let positions = generators
            .iter()
            .map(|g| frame.log_position(*g))
            .collect::<Result<Vec<_>, _>>()?;
        let mut terms = Terms::zero(positions.len());
        terms.accumulate_unsorted(positions, scalar::real(Rational::one()));
        Ok(ComplexLogForm { frame, terms })
    }

    pub fn frame(&self) -> ChartFrame {
        self.frame
    }

    pub fn degree(&self) -> usize {
        self.terms.degree
    }

    pub fn coefficient(&self, generators: &[LogGenerator]) -> Result<Scalar, ChartError> {
        let positions = generators
            .iter()
            .map(|g| self.frame.log_position(*g))
            .collect::<Result<Vec<_>, _>>()?;
        if positions.len() != self.degree() {
            return Ok(Scalar::zero());
        }
        Ok(self.terms.signed_coefficient(&positions))
    }

    pub fn scale(&self, factor: &Scalar) -> Self {
        ComplexLogForm { frame: self.frame, terms: self.terms.map_coeffs(|_, v| v * factor) }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ChartError> {
        if self.frame != other.frame {
            return Err(ChartError::FrameMismatch(self.frame, other.frame));
        }
        if self.degree() != other.degree() {
            return Err(ChartError::Degree { expected: self.degree(), actual: other.degree() });
        }
        Ok(ComplexLogForm { frame: self.frame, terms: self.terms.add(&other.terms) })
    }

    /// Nonzero terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<LogGenerator>, &Scalar)> + '_ {
        self.terms
            .coeffs
            .iter()
            .map(|(key, value)| (key.iter().map(|&p| self.frame.log_generator(p)).collect(), value))
    }

    /// Rewrites the form in the elliptic frame via `dlog z_i = dlog r_i + i dtheta_i`.
    pub fn expand(&self) -> EllipticForm {
        let mut out = EllipticForm::zero(self.frame, self.degree());
        for (key, value) in &self.terms.coeffs {
            let mut product = EllipticForm::one(self.frame);
            for &position in key {
                let factor = self.generator_image(position);
                product = product.wedge(&factor).expect("same frame");
            }
            out = out.try_add(&product.scale(value)).expect("same frame and degree");
        }
        out
    }

    fn generator_image(&self, position: usize) -> EllipticForm {
        let frame = self.frame;
        match frame.log_generator(position) {
            LogGenerator::Log(i) => {
                let log = EllipticForm::basis(frame, &[Generator::Log(i)]).expect("in frame");
                let angle = EllipticForm::basis(frame, &[Generator::Angle(i)]).expect("in frame");
                &log + &angle.scale(&scalar::imaginary_unit())
            }
            LogGenerator::Smooth(j) => EllipticForm::basis(frame, &[Generator::Smooth(j)]).expect("in frame"),
        }
    }

    /// Imaginary part in the elliptic frame; a real form.
    pub fn im_star(&self) -> EllipticForm {
        self.expand().imag_part()
    }
}

impl fmt::Display for ComplexLogForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms().map(|(gens, v)| (gens.iter().map(|g| g.to_string()).collect(), v)))
    }
}

/// Substitutes `dlog z_i = dlog r_i + i dtheta_i`.
pub fn expand_complex(sigma: &ComplexLogForm) -> EllipticForm {
    sigma.expand()
}

/// Imaginary part of the pullback of a complex log form to the elliptic frame.
pub fn im_star(sigma: &ComplexLogForm) -> EllipticForm {
    sigma.im_star()
}

pub fn wedge(a: &EllipticForm, b: &EllipticForm) -> Result<EllipticForm, ChartError> {
    a.wedge(b)
}

pub fn residue(
    omega: &EllipticForm,
    kind: ResidueKind,
    i: usize,
    j: Option<usize>,
) -> Result<Scalar, ChartError> {
    omega.residue(kind, i, j)
}

pub fn is_nondegenerate(omega: &EllipticForm) -> Result<bool, ChartError> {
    omega.is_nondegenerate()
}

pub fn flip_strand(omega: &EllipticForm, strand: usize) -> Result<EllipticForm, ChartError> {
    omega.flip_strand(strand)
}

/// Residue pairing type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResidueKind {
    RR,
    RTheta,
    ThetaR,
    ThetaTheta,
    /// The elliptic residue `Res_q`, coefficient of `Li ^ Ti`.
    Elliptic,
}

impl fmt::Display for ResidueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResidueKind::RR => "rr",
            ResidueKind::RTheta => "rθ",
            ResidueKind::ThetaR => "θr",
            ResidueKind::ThetaTheta => "θθ",
            ResidueKind::Elliptic => "q",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    #[serde(rename = "condition-1")]
    Condition1,
    #[serde(rename = "condition-2")]
    Condition2,
    Neither,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Condition1 => "condition-1",
            Branch::Condition2 => "condition-2",
            Branch::Neither => "neither",
        })
    }
}

/// Local data of an elliptic symplectic form at a crossing point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointClass {
    pub nondegenerate: bool,
    pub elliptic_residues: Vec<Scalar>,
    /// Kernel conditions hold and the form is nondegenerate.
    pub in_im_image: bool,
    pub locally_complex: bool,
    pub branch: Branch,
    pub index: Option<Sign>,
    pub imaginary_parameter: bool,
    /// `Res_{r1 theta2}` when locally complex.
    pub lambda1: Option<Rational>,
    /// `Res_{r1 r2}` when locally complex.
    pub lambda2: Option<Rational>,
}

impl PointClass {
    /// `|Res_{r1 r2}|`, the modulus matched by connected sums.
    pub fn param_modulus(&self) -> Option<Rational> {
        self.lambda2.as_ref().map(|l| l.abs())
    }
}

/// Classifies a real elliptic 2-form at the origin of a crossing chart.
pub fn classify_point(omega: &EllipticForm) -> Result<PointClass, ChartError> {
    let frame = omega.frame();
    if frame.k != 2 || frame.m != 0 {
        return Err(ChartError::UnsupportedChart { k: frame.k, m: frame.m });
    }
    omega.require_two_form()?;
    if !omega.is_real() {
        return Err(ChartError::NotReal);
    }
    let nondegenerate = omega.is_nondegenerate()?;
    let elliptic_residues = vec![
        omega.residue(ResidueKind::Elliptic, 1, None)?,
        omega.residue(ResidueKind::Elliptic, 2, None)?,
    ];
    let residues_vanish = elliptic_residues.iter().all(Zero::is_zero);
    let branch = branch_of(omega, 1, 2);
    let locally_complex = residues_vanish && branch != Branch::Neither && nondegenerate;
    let in_im_image = locally_complex && branch == Branch::Condition1;
    let index = match (locally_complex, branch) {
        (true, Branch::Condition1) => Some(Sign::Plus),
        (true, Branch::Condition2) => Some(Sign::Minus),
        _ => None,
    };
    let r1t2 = omega.crossing_residue(ResidueKind::RTheta, 1, 2);
    let r2t1 = omega.crossing_residue(ResidueKind::RTheta, 2, 1);
    let imaginary_parameter = r1t2.is_zero() && r2t1.is_zero();
    let (lambda1, lambda2) = if locally_complex {
        (Some(r1t2), Some(omega.crossing_residue(ResidueKind::RR, 1, 2)))
    } else {
        (None, None)
    };
    Ok(PointClass {
        nondegenerate,
        elliptic_residues,
        in_im_image,
        locally_complex,
        branch,
        index,
        imaginary_parameter,
        lambda1,
        lambda2,
    })
}

/// `l1 (L1^T2 + T1^L2) + l2 (L1^L2 - T1^T2)` on the crossing chart.
pub fn normal_form(lambda1: &Rational, lambda2: &Rational) -> Result<EllipticForm, ChartError> {
    if lambda1.is_zero() && lambda2.is_zero() {
        return Err(ChartError::DegenerateParameters);
    }
    use Generator::{Angle as T, Log as L};
    let frame = ChartFrame::crossing();
    let (l1, l2) = (scalar::real(lambda1.clone()), scalar::real(lambda2.clone()));
    // canonical order: L1 < T1 < L2 < T2
    EllipticForm::from_terms(
        frame,
        2,
        [
            (vec![L(1), T(2)], l1.clone()),
            (vec![T(1), L(2)], l1),
            (vec![L(1), L(2)], l2.clone()),
            (vec![T(1), T(2)], -l2),
        ],
    )
}

/// Complex log form `sigma = rho_2 / rho_0` of the spinor
/// `lambda z1 z2 + dz1 ^ dz2`, i.e. `(1/lambda) Z1 ^ Z2`.
pub fn spinor_to_log_form(lambda: &Scalar) -> Result<ComplexLogForm, ChartError> {
    let inverse = scalar::recip(lambda).ok_or(ChartError::ZeroSpinorParameter)?;
    let frame = ChartFrame::crossing();
    let z1z2 = ComplexLogForm::basis(frame, &[LogGenerator::Log(1), LogGenerator::Log(2)])?;
    Ok(z1z2.scale(&inverse))
}

/// Local model `modulus * Im*(i Z1 ^ Z2)` at a point with imaginary parameter,
/// with strand 2 flipped when `index` is negative.
pub fn imaginary_parameter_model(modulus: &Rational, index: Sign) -> Result<EllipticForm, ChartError> {
    let form = normal_form(&Rational::zero(), modulus)?;
    match index {
        Sign::Plus => Ok(form),
        Sign::Minus => form.flip_strand(2),
    }
}
