//! Polynomial vector fields and the system-definition text format.
//!
//! A system file looks like
//!
//! ```text
//! # Example 1
//! dim 2
//! dx1 = -x1*(4 - (x1-1)^2 - x2^2)
//! dx2 = -x2*(4 - (x1-1)^2 - x2^2)
//! ```
//!
//! Grammar (whitespace-insensitive inside lines, `#` starts a comment):
//!
//! ```text
//! file      := "dim" INT NEWLINE component*
//! component := "dx" INT "=" expr
//! expr      := ["+"|"-"] term (("+"|"-") term)*
//! term      := factor ("*" factor)*
//! factor    := atom ["^" INT]
//! atom      := NUMBER | "x" INT | "(" expr ")" | ("+"|"-") factor
//! ```
//!
//! Products and powers are expanded; like monomials are combined and zero
//! coefficients dropped. The origin must be a steady state, so a nonzero
//! constant term is rejected.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::index::{MultiIndex, MAX_DEGREE, MAX_DIM};

/// Guard against pathological inputs blowing up the expansion.
const TERM_BUDGET: usize = 1 << 16;

/// A polynomial vector field `f: R^n -> R^n` with `f(0) = 0`, stored as one
/// sparse coefficient map per component.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyField {
    dim: usize,
    components: Vec<BTreeMap<MultiIndex, f64>>,
}

impl PolyField {
    /// Builds a field from per-component coefficient maps, dropping zeros.
    ///
    /// Returns an error if a component carries a constant term.
    pub fn new(
        dim: usize,
        components: Vec<BTreeMap<MultiIndex, f64>>,
    ) -> Result<Self, ParseError> {
        if dim < 1 || dim > MAX_DIM {
            return Err(ParseError::UnsupportedDim(dim));
        }
        assert_eq!(components.len(), dim);
        let mut cleaned = Vec::with_capacity(dim);
        for (ci, comp) in components.into_iter().enumerate() {
            let mut map = BTreeMap::new();
            for (j, c) in comp {
                assert_eq!(j.dim(), dim);
                if c == 0.0 {
                    continue;
                }
                if j.degree() == 0 {
                    return Err(ParseError::ConstantTerm {
                        component: ci + 1,
                        value: c,
                    });
                }
                map.insert(j, c);
            }
            cleaned.push(map);
        }
        Ok(PolyField {
            dim,
            components: cleaned,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sparse coefficient map of component `i` (0-based).
    pub fn component(&self, i: usize) -> &BTreeMap<MultiIndex, f64> {
        &self.components[i]
    }

    /// Largest total degree over all components (0 for the zero field).
    pub fn total_degree(&self) -> usize {
        self.components
            .iter()
            .flat_map(|c| c.keys().map(|j| j.degree()))
            .max()
            .unwrap_or(0)
    }

    /// Evaluates `f(x)` into `out`.
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        for (i, comp) in self.components.iter().enumerate() {
            let mut acc = 0.0;
            for (j, &c) in comp {
                let mut term = c;
                for (l, e) in j.exponents().enumerate() {
                    for _ in 0..e {
                        term *= x[l];
                    }
                }
                acc += term;
            }
            out[i] = acc;
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, &mut out);
        out
    }

    /// Matrix of degree-1 coefficients: the Jacobian of `f` at the origin.
    pub fn jacobian_at_origin(&self) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |i, l| {
            self.components[i]
                .get(&MultiIndex::unit(n, l))
                .copied()
                .unwrap_or(0.0)
        })
    }

    /// Canonical text form that [`parse_system`] re-parses to an identical
    /// coefficient map. Coefficients print in shortest round-trip form.
    pub fn to_system_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim);
        for (i, comp) in self.components.iter().enumerate() {
            out.push_str(&format!("dx{} = ", i + 1));
            if comp.is_empty() {
                out.push('0');
            } else {
                for (ti, (j, &c)) in comp.iter().enumerate() {
                    let mag = c.abs();
                    if ti == 0 {
                        if c < 0.0 {
                            out.push('-');
                        }
                    } else if c < 0.0 {
                        out.push_str(" - ");
                    } else {
                        out.push_str(" + ");
                    }
                    let mut factors: Vec<String> = Vec::new();
                    if mag != 1.0 || j.degree() == 0 {
                        factors.push(format!("{mag}"));
                    }
                    for (l, e) in j.exponents().enumerate() {
                        match e {
                            0 => {}
                            1 => factors.push(format!("x{}", l + 1)),
                            _ => factors.push(format!("x{}^{}", l + 1, e)),
                        }
                    }
                    if factors.is_empty() {
                        factors.push("1".to_string());
                    }
                    out.push_str(&factors.join("*"));
                }
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("dim must be between 1 and {MAX_DIM}, got {0}")]
    UnsupportedDim(usize),
    #[error("component dx{component} has a constant term {value}; the origin must be a steady state")]
    ConstantTerm { component: usize, value: f64 },
    #[error("line {line}: variable x{var} used but dim is {dim}")]
    DimensionMismatch { line: usize, var: usize, dim: usize },
    #[error("line {line}: duplicate definition of dx{component}")]
    DuplicateComponent { line: usize, component: usize },
    #[error("missing definition of dx{component}")]
    MissingComponent { component: usize },
    #[error("first line must be `dim n`")]
    MissingDim,
}

/// Parses a system-definition document into a [`PolyField`].
pub fn parse_system(text: &str) -> Result<PolyField, ParseError> {
    let mut dim: Option<usize> = None;
    let mut components: Vec<Option<BTreeMap<MultiIndex, f64>>> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_num = lineno + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        match dim {
            None => {
                let d = parse_dim_line(line, line_num)?;
                if d < 1 || d > MAX_DIM {
                    return Err(ParseError::UnsupportedDim(d));
                }
                dim = Some(d);
                components = vec![None; d];
            }
            Some(n) => {
                let (idx, rhs, rhs_col) = split_component_line(line, line_num)?;
                if idx < 1 || idx > n {
                    return Err(ParseError::Syntax {
                        line: line_num,
                        col: 1,
                        msg: format!("component dx{idx} out of range for dim {n}"),
                    });
                }
                if components[idx - 1].is_some() {
                    return Err(ParseError::DuplicateComponent {
                        line: line_num,
                        component: idx,
                    });
                }
                let poly = ExprParser::new(rhs, line_num, rhs_col, n).parse()?;
                components[idx - 1] = Some(poly);
            }
        }
    }

    let n = dim.ok_or(ParseError::MissingDim)?;
    let mut filled = Vec::with_capacity(n);
    for (i, comp) in components.into_iter().enumerate() {
        filled.push(comp.ok_or(ParseError::MissingComponent { component: i + 1 })?);
    }
    PolyField::new(n, filled)
}

fn parse_dim_line(line: &str, line_num: usize) -> Result<usize, ParseError> {
    let trimmed = line.trim();
    let rest = trimmed.strip_prefix("dim").ok_or(ParseError::MissingDim)?;
    rest.trim().parse::<usize>().map_err(|_| ParseError::Syntax {
        line: line_num,
        col: 4,
        msg: "expected an integer after `dim`".to_string(),
    })
}

/// Splits `dx<i> = <expr>`, returning the component index, the expression
/// text, and the column where the expression starts.
fn split_component_line(line: &str, line_num: usize) -> Result<(usize, &str, usize), ParseError> {
    let syntax = |col: usize, msg: &str| ParseError::Syntax {
        line: line_num,
        col,
        msg: msg.to_string(),
    };
    let trimmed_start = line.len() - line.trim_start().len();
    let body = line.trim_start();
    let body = body
        .strip_prefix("dx")
        .ok_or_else(|| syntax(trimmed_start + 1, "expected `dx<i> = <expr>`"))?;
    let digits: String = body.chars().take_while(|c| c.is_ascii_digit()).collect();
    if digits.is_empty() {
        return Err(syntax(trimmed_start + 3, "expected component index after `dx`"));
    }
    let idx: usize = digits
        .parse()
        .map_err(|_| syntax(trimmed_start + 3, "component index too large"))?;
    let after = &body[digits.len()..];
    let eq_pos = after
        .find('=')
        .ok_or_else(|| syntax(trimmed_start + 3 + digits.len(), "expected `=`"))?;
    if !after[..eq_pos].trim().is_empty() {
        return Err(syntax(
            trimmed_start + 3 + digits.len(),
            "unexpected text before `=`",
        ));
    }
    let rhs_col = trimmed_start + 2 + digits.len() + eq_pos + 2;
    Ok((idx, &after[eq_pos + 1..], rhs_col))
}

type Poly = BTreeMap<MultiIndex, f64>;

struct ExprParser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col_offset: usize,
    dim: usize,
}

impl ExprParser {
    fn new(text: &str, line: usize, col_offset: usize, dim: usize) -> Self {
        ExprParser {
            chars: text.chars().collect(),
            pos: 0,
            line,
            col_offset,
            dim,
        }
    }

    fn parse(mut self) -> Result<Poly, ParseError> {
        let poly = self.expr()?;
        self.skip_ws();
        if self.pos < self.chars.len() {
            return Err(self.syntax("unexpected trailing input"));
        }
        Ok(poly.into_iter().filter(|(_, c)| *c != 0.0).collect())
    }

    fn syntax(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            col: self.col_offset + self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = Poly::new();
        let mut sign = 1.0;
        if let Some(c) = self.peek() {
            if c == '+' || c == '-' {
                self.pos += 1;
                sign = if c == '-' { -1.0 } else { 1.0 };
            }
        }
        let first = self.term()?;
        add_scaled(&mut acc, &first, sign);
        while let Some(c) = self.peek() {
            if c != '+' && c != '-' {
                break;
            }
            self.pos += 1;
            let t = self.term()?;
            add_scaled(&mut acc, &t, if c == '-' { -1.0 } else { 1.0 });
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        while let Some('*') = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = self.mul(&acc, &rhs)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if let Some('^') = self.peek() {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer("exponent")?;
            if e > MAX_DEGREE {
                return Err(self.syntax(&format!("exponent {e} exceeds maximum {MAX_DEGREE}")));
            }
            return self.pow(&base, e);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of expression")),
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(')') => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.syntax("expected `)`")),
                }
            }
            Some(c) if c == '+' || c == '-' => {
                self.pos += 1;
                let f = self.factor()?;
                let mut out = Poly::new();
                add_scaled(&mut out, &f, if c == '-' { -1.0 } else { 1.0 });
                Ok(out)
            }
            Some('x') => {
                self.pos += 1;
                let var = self.integer("variable index")?;
                if var < 1 || var > self.dim {
                    return Err(ParseError::DimensionMismatch {
                        line: self.line,
                        var,
                        dim: self.dim,
                    });
                }
                let mut out = Poly::new();
                out.insert(MultiIndex::unit(self.dim, var - 1), 1.0);
                Ok(out)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let v = self.number()?;
                let mut out = Poly::new();
                out.insert(MultiIndex::zero(self.dim), v);
                Ok(out)
            }
            Some(c) => Err(self.syntax(&format!("unexpected character `{c}`"))),
        }
    }

    fn integer(&mut self, what: &str) -> Result<usize, ParseError> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.syntax(&format!("expected {what}")));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse()
            .map_err(|_| self.syntax(&format!("{what} out of range")))
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if matches!(self.chars.get(self.pos), Some('e') | Some('E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+') | Some('-')) {
                self.pos += 1;
            }
            let digits_start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == digits_start {
                self.pos = mark; // `e` belonged to something else; not a float exponent
            }
        }
        if self.pos == start {
            return Err(self.syntax("expected a number"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        let v: f64 = s
            .parse()
            .map_err(|_| self.syntax(&format!("invalid number `{s}`")))?;
        if !v.is_finite() {
            return Err(self.syntax(&format!("coefficient `{s}` overflows f64")));
        }
        Ok(v)
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Result<Poly, ParseError> {
        if a.len().saturating_mul(b.len()) > TERM_BUDGET {
            return Err(self.syntax("expression expands to too many terms"));
        }
        let mut out = Poly::new();
        for (ja, ca) in a {
            for (jb, cb) in b {
                *out.entry(ja.add(jb)).or_insert(0.0) += ca * cb;
            }
        }
        if out.len() > TERM_BUDGET {
            return Err(self.syntax("expression expands to too many terms"));
        }
        Ok(out)
    }

    fn pow(&self, base: &Poly, e: usize) -> Result<Poly, ParseError> {
        let mut out = Poly::new();
        out.insert(MultiIndex::zero(self.dim), 1.0);
        for _ in 0..e {
            out = self.mul(&out, base)?;
        }
        Ok(out)
    }
}

fn add_scaled(acc: &mut Poly, other: &Poly, scale: f64) {
    for (j, c) in other {
        let slot = acc.entry(*j).or_insert(0.0);
        *slot += scale * c;
        if *slot == 0.0 {
            acc.remove(j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EXAMPLE1: &str = "\
dim 2
dx1 = -x1*(4 - (x1-1)^2 - x2^2)
dx2 = -x2*(4 - (x1-1)^2 - x2^2)
";

    fn mi(e: &[usize]) -> MultiIndex {
        MultiIndex::new(e)
    }

    #[test]
    fn example1_component_expansion() {
        let f = parse_system(EXAMPLE1).unwrap();
        // -x1*(4 - (x1-1)^2 - x2^2) = -3*x1 - 2*x1^2 + x1^3 + x1*x2^2
        let expected: Poly = [
            (mi(&[1, 0]), -3.0),
            (mi(&[2, 0]), -2.0),
            (mi(&[3, 0]), 1.0),
            (mi(&[1, 2]), 1.0),
        ]
        .into_iter()
        .collect();
        assert_eq!(f.component(0), &expected);
    }

    #[test]
    fn minimal_linear_system() {
        let f = parse_system("dim 1\ndx1 = -x1\n").unwrap();
        let expected: Poly = [(mi(&[1]), -1.0)].into_iter().collect();
        assert_eq!(f.component(0), &expected);
    }

    #[test]
    fn constant_term_rejected() {
        let err = parse_system("dim 1\ndx1 = 1 - x1\n").unwrap_err();
        assert!(matches!(err, ParseError::ConstantTerm { component: 1, .. }));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_system("dim 2\ndx1 = x1 * * x2\ndx2 = x1\n").unwrap_err();
        match err {
            ParseError::Syntax { line, col, .. } => {
                assert_eq!(line, 2);
                assert!(col >= 12, "col = {col}");
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch() {
        let err = parse_system("dim 1\ndx1 = x2\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::DimensionMismatch {
                line: 2,
                var: 2,
                dim: 1
            }
        );
    }

    #[test]
    fn duplicate_and_missing_components() {
        let err = parse_system("dim 2\ndx1 = x1\ndx1 = x2\n").unwrap_err();
        assert!(matches!(err, ParseError::DuplicateComponent { component: 1, .. }));
        let err = parse_system("dim 2\ndx1 = -x1\n").unwrap_err();
        assert_eq!(err, ParseError::MissingComponent { component: 2 });
    }

    #[test]
    fn comments_and_blank_lines() {
        let f = parse_system("# heading\n\ndim 1  # inline\ndx1 = -2.5*x1 # decay\n").unwrap();
        assert_eq!(f.component(0).get(&mi(&[1])), Some(&-2.5));
    }

    #[test]
    fn jacobian_of_example1() {
        let f = parse_system(EXAMPLE1).unwrap();
        let a = f.jacobian_at_origin();
        assert_eq!(a, DMatrix::from_row_slice(2, 2, &[-3.0, 0.0, 0.0, -3.0]));
    }

    #[test]
    fn jacobian_reads_linear_part() {
        let f = parse_system("dim 2\ndx1 = x2\ndx2 = -2*x1 - 3*x2 + x1^2 - x2^2 + x1*x2\n")
            .unwrap();
        let a = f.jacobian_at_origin();
        assert_eq!(a, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -2.0, -3.0]));
    }

    #[test]
    fn round_trip_fixture() {
        let f = parse_system(EXAMPLE1).unwrap();
        let text = f.to_system_text();
        let g = parse_system(&text).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn scientific_notation_coefficients() {
        let f = parse_system("dim 1\ndx1 = -1.5e-2*x1\n").unwrap();
        assert_eq!(f.component(0).get(&mi(&[1])), Some(&-0.015));
    }

    #[test]
    fn zero_component_round_trips() {
        let f = parse_system("dim 2\ndx1 = -x1\ndx2 = 0\n").unwrap();
        assert!(f.component(1).is_empty());
        let g = parse_system(&f.to_system_text()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn exponent_budget_enforced() {
        let err = parse_system("dim 1\ndx1 = x1^61\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
    }
}
