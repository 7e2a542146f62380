//! One canonical text grammar for forms, polynomials, set descriptors, and
//! right-hand sides.
//!
//! Forms and polynomials come either as comma-separated coefficients
//! (leading first: `1,0,1`) or as polynomial syntax in x and y
//! (`x^2+y^2`, `2x^3 - x y^2`). Set descriptors: `Z`, `AP a b`,
//! `POLY c2 c1 c0`, `WINDOW file.txt`. Right-hand sides: `factorial`,
//! `lcm`, `primorial`, `multinomial:a`, `pik:delta`, `piktable:file`,
//! `set:<descriptor>`.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::bhargava::BhargavaSet;
use crate::formclass::BinaryForm;
use crate::genfact::HSeqKind;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
struct Monomial {
    coeff: BigInt,
    xp: u32,
    yp: u32,
}

fn parse_monomials(input: &str) -> Result<Vec<Monomial>> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms = Vec::new();
    let bytes: Vec<char> = s.chars().collect();
    let mut i = 0usize;
    while i < bytes.len() {
        let mut sign = 1i32;
        while i < bytes.len() && (bytes[i] == '+' || bytes[i] == '-') {
            if bytes[i] == '-' {
                sign = -sign;
            }
            i += 1;
        }
        if i >= bytes.len() {
            return Err(Error::Parse("dangling sign".into()));
        }
        let start = i;
        while i < bytes.len() && bytes[i] != '+' && bytes[i] != '-' {
            i += 1;
        }
        let term: String = bytes[start..i].iter().collect();
        let mut m = parse_term(&term)?;
        if sign < 0 {
            m.coeff = -m.coeff;
        }
        terms.push(m);
    }
    Ok(terms)
}

fn parse_term(term: &str) -> Result<Monomial> {
    let chars: Vec<char> = term.chars().collect();
    let mut i = 0usize;
    let mut digits = String::new();
    while i < chars.len() && chars[i].is_ascii_digit() {
        digits.push(chars[i]);
        i += 1;
    }
    let mut coeff: BigInt = if digits.is_empty() {
        BigInt::from(1)
    } else {
        digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad coefficient in `{term}`")))?
    };
    let mut xp = 0u32;
    let mut yp = 0u32;
    while i < chars.len() {
        match chars[i] {
            '*' => {
                i += 1;
                // allow products of numeric factors: 2*3*x
                let mut more = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    more.push(chars[i]);
                    i += 1;
                }
                if !more.is_empty() {
                    let f: BigInt = more
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad factor in `{term}`")))?;
                    coeff *= f;
                }
            }
            'x' | 'y' => {
                let var = chars[i];
                i += 1;
                let mut exp = 1u32;
                if i < chars.len() && chars[i] == '^' {
                    i += 1;
                    let mut ed = String::new();
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        ed.push(chars[i]);
                        i += 1;
                    }
                    exp = ed
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in `{term}`")))?;
                }
                if var == 'x' {
                    xp += exp;
                } else {
                    yp += exp;
                }
            }
            c => {
                return Err(Error::Parse(format!(
                    "unexpected character `{c}` in term `{term}`"
                )))
            }
        }
    }
    Ok(Monomial { coeff, xp, yp })
}

fn parse_comma_coeffs(s: &str) -> Result<Vec<BigInt>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad coefficient `{}`", t.trim())))
        })
        .collect()
}

/// Parse a homogeneous binary form, either comma coefficients `a_n,...,a_0`
/// or polynomial syntax in x and y.
pub fn parse_form(input: &str) -> Result<BinaryForm> {
    let input = input.trim();
    if input.contains(',') {
        return BinaryForm::new(parse_comma_coeffs(input)?);
    }
    let monomials = parse_monomials(input)?;
    let degree = monomials
        .iter()
        .filter(|m| !m.coeff.is_zero())
        .map(|m| m.xp + m.yp)
        .max()
        .ok_or_else(|| Error::Parse("zero polynomial".into()))?;
    for m in &monomials {
        if !m.coeff.is_zero() && m.xp + m.yp != degree {
            return Err(Error::Parse(format!(
                "form is not homogeneous: a degree-{} monomial next to degree {degree}",
                m.xp + m.yp
            )));
        }
    }
    let mut coeffs = vec![BigInt::zero(); degree as usize + 1];
    for m in &monomials {
        // descending storage: index 0 holds x^degree
        coeffs[(degree - m.xp) as usize] += &m.coeff;
    }
    BinaryForm::new(coeffs)
}

/// Parse a univariate polynomial in x; comma syntax is read as descending
/// coefficients. Returns ascending coefficients.
pub fn parse_poly(input: &str) -> Result<Vec<BigInt>> {
    let input = input.trim();
    let asc: Vec<BigInt> = if input.contains(',') {
        parse_comma_coeffs(input)?.into_iter().rev().collect()
    } else {
        let monomials = parse_monomials(input)?;
        let degree = monomials.iter().map(|m| m.xp).max().unwrap_or(0);
        let mut coeffs = vec![BigInt::zero(); degree as usize + 1];
        for m in &monomials {
            if m.yp != 0 {
                return Err(Error::Parse(
                    "expected a univariate polynomial in x".into(),
                ));
            }
            coeffs[m.xp as usize] += &m.coeff;
        }
        coeffs
    };
    let mut asc = asc;
    while asc.last().map(|c| c.is_zero()).unwrap_or(false) {
        asc.pop();
    }
    if asc.len() < 2 {
        return Err(Error::Parse("polynomial must have degree >= 1".into()));
    }
    Ok(asc)
}

/// A set descriptor; windows need file contents the caller must supply.
#[derive(Clone, Debug)]
pub enum SetDescriptor {
    Ready(BhargavaSet),
    WindowFile(String),
}

/// Parse `Z`, `AP a b`, `POLY c..c0` (degree <= 3), or `WINDOW path`.
pub fn parse_set_descriptor(input: &str) -> Result<SetDescriptor> {
    let tokens: Vec<&str> = input.split_whitespace().collect();
    match tokens.as_slice() {
        ["Z"] | ["z"] => Ok(SetDescriptor::Ready(BhargavaSet::Integers)),
        ["AP", a, b] | ["ap", a, b] => {
            let step: i64 = a
                .parse()
                .map_err(|_| Error::Parse(format!("bad progression step `{a}`")))?;
            let offset: i64 = b
                .parse()
                .map_err(|_| Error::Parse(format!("bad progression offset `{b}`")))?;
            Ok(SetDescriptor::Ready(BhargavaSet::ap(step, offset)?))
        }
        [kw, rest @ ..] if kw.eq_ignore_ascii_case("POLY") && !rest.is_empty() => {
            let coeffs: Vec<i64> = rest
                .iter()
                .map(|t| {
                    t.parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad coefficient `{t}`")))
                })
                .collect::<Result<_>>()?;
            Ok(SetDescriptor::Ready(BhargavaSet::poly_image(coeffs)?))
        }
        [kw, path] if kw.eq_ignore_ascii_case("WINDOW") => {
            Ok(SetDescriptor::WindowFile((*path).to_string()))
        }
        _ => Err(Error::Parse(format!(
            "unrecognized set descriptor `{input}` (expected Z, AP a b, POLY c.., WINDOW file)"
        ))),
    }
}

/// Whitespace/newline separated integers, `#` comments.
pub fn parse_window_values(text: &str) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split_whitespace() {
            out.push(
                tok.parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad window value `{tok}`")))?,
            );
        }
    }
    Ok(out)
}

/// A right-hand-side descriptor; table-backed variants need file contents.
#[derive(Clone, Debug)]
pub enum RhsSpec {
    Hseq(HSeqKind),
    PiQuadratic(i64),
    PiTableFile(String),
    Set(SetDescriptor),
}

/// Parse `factorial`, `lcm`, `primorial`, `multinomial:a`, `pik:delta`,
/// `piktable:file`, or `set:<set descriptor>`.
pub fn parse_rhs(input: &str) -> Result<RhsSpec> {
    let input = input.trim();
    let lower = input.to_ascii_lowercase();
    match lower.as_str() {
        "factorial" => return Ok(RhsSpec::Hseq(HSeqKind::Factorial)),
        "lcm" => return Ok(RhsSpec::Hseq(HSeqKind::Lcm)),
        "primorial" => return Ok(RhsSpec::Hseq(HSeqKind::Primorial)),
        _ => {}
    }
    if let Some(rest) = lower.strip_prefix("multinomial:") {
        let a: u64 = rest
            .parse()
            .map_err(|_| Error::Parse(format!("bad multinomial parameter `{rest}`")))?;
        return Ok(RhsSpec::Hseq(HSeqKind::Multinomial(a)));
    }
    if let Some(rest) = lower.strip_prefix("pik:") {
        let delta: i64 = rest
            .parse()
            .map_err(|_| Error::Parse(format!("bad discriminant `{rest}`")))?;
        return Ok(RhsSpec::PiQuadratic(delta));
    }
    if let Some(rest) = input.strip_prefix("piktable:").or_else(|| input.strip_prefix("PIKTABLE:")) {
        return Ok(RhsSpec::PiTableFile(rest.trim().to_string()));
    }
    if let Some(rest) = input
        .strip_prefix("set:")
        .or_else(|| input.strip_prefix("SET:"))
    {
        return Ok(RhsSpec::Set(parse_set_descriptor(rest.trim())?));
    }
    Err(Error::Parse(format!(
        "unrecognized right-hand side `{input}`"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn form_polynomial_syntax() {
        let f = parse_form("x^2+y^2").unwrap();
        assert_eq!(f.to_string(), "x^2+y^2");
        let f = parse_form("x^2 - 2 x y + y^2").unwrap();
        assert_eq!(f.to_string(), "x^2-2xy+y^2");
        let f = parse_form("2*x^3 - x*y^2").unwrap();
        assert_eq!(f.to_string(), "2x^3-xy^2");
        let f = parse_form("-x^2+y^2").unwrap();
        assert_eq!(f.to_string(), "-x^2+y^2");
    }

    #[test]
    fn form_comma_syntax() {
        let f = parse_form("1,0,1").unwrap();
        assert_eq!(f.to_string(), "x^2+y^2");
        let f = parse_form("1, -2, 1").unwrap();
        assert_eq!(f.to_string(), "x^2-2xy+y^2");
    }

    #[test]
    fn rejects_inhomogeneous_forms() {
        assert!(parse_form("x^2+y").is_err());
        assert!(parse_form("x^2+1").is_err());
    }

    #[test]
    fn poly_syntax() {
        let p = parse_poly("x^2-1").unwrap();
        let vals: Vec<i64> = p.iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(vals, vec![-1, 0, 1]);
        let p = parse_poly("1,0,-1").unwrap();
        let vals: Vec<i64> = p.iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(vals, vec![-1, 0, 1]);
        assert!(parse_poly("x+y").is_err());
        assert!(parse_poly("5").is_err());
    }

    #[test]
    fn set_descriptors() {
        assert!(matches!(
            parse_set_descriptor("Z").unwrap(),
            SetDescriptor::Ready(BhargavaSet::Integers)
        ));
        match parse_set_descriptor("AP 2 1").unwrap() {
            SetDescriptor::Ready(BhargavaSet::Ap { step, offset }) => {
                assert_eq!((step, offset), (2, 1));
            }
            other => panic!("{other:?}"),
        }
        match parse_set_descriptor("POLY 1 0 0").unwrap() {
            SetDescriptor::Ready(BhargavaSet::PolyImage { coeffs }) => {
                assert_eq!(coeffs, vec![1, 0, 0]);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_set_descriptor("WINDOW values.txt").unwrap(),
            SetDescriptor::WindowFile(_)
        ));
        assert!(parse_set_descriptor("AP 0 1").is_err());
    }

    #[test]
    fn window_values() {
        let vals = parse_window_values("1 4 9\n16 25 # squares\n").unwrap();
        assert_eq!(vals, vec![1, 4, 9, 16, 25]);
    }

    #[test]
    fn rhs_descriptors() {
        assert!(matches!(
            parse_rhs("factorial").unwrap(),
            RhsSpec::Hseq(HSeqKind::Factorial)
        ));
        assert!(matches!(
            parse_rhs("multinomial:3").unwrap(),
            RhsSpec::Hseq(HSeqKind::Multinomial(3))
        ));
        assert!(matches!(parse_rhs("pik:-4").unwrap(), RhsSpec::PiQuadratic(-4)));
        assert!(matches!(
            parse_rhs("piktable:field.txt").unwrap(),
            RhsSpec::PiTableFile(_)
        ));
        assert!(matches!(parse_rhs("set:AP 2 1").unwrap(), RhsSpec::Set(_)));
        assert!(parse_rhs("nonsense").is_err());
    }
}
