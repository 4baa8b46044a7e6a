//! Text forms: the ring descriptor grammar (`Z`, `Z/6`, `Z[X]/(X^2-1)`,
//! `Z/3 x Z/5`, with parentheses for nesting), ring element literals,
//! Clifford element expressions like `3 + 2*e{1} - e{1,2}`, and the
//! key=value configuration block used by the command line.
//!
//! All parse errors carry a line and column.

use num_bigint::BigInt;

use crate::clifford::{CliffordAlgebra, CliffordElement, Mask};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::quadratic::QuadraticModule;
use crate::ring::{Ring, RingElement, RingKind};

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Cursor<'a> {
        Cursor { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, col: self.col, msg: msg.into() }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(b' ') | Some(b'\t') | Some(b'\r') | Some(b'\n') => {
                    self.bump();
                }
                Some(b'#') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn eat(&mut self, token: u8) -> Result<()> {
        if self.peek() == Some(token) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!(
                "expected '{}', found {}",
                token as char,
                self.describe_current()
            )))
        }
    }

    fn try_eat(&mut self, token: u8) -> bool {
        if self.peek() == Some(token) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn describe_current(&self) -> String {
        match self.peek() {
            Some(c) => format!("'{}'", c as char),
            None => "end of input".into(),
        }
    }

    fn parse_uint(&mut self) -> Result<BigInt> {
        let mut digits = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                digits.push(c as char);
                self.bump();
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return Err(self.err(format!("expected a number, found {}", self.describe_current())));
        }
        Ok(digits.parse().expect("digits"))
    }

    fn parse_int(&mut self) -> Result<BigInt> {
        let neg = self.try_eat(b'-');
        if !neg {
            self.try_eat(b'+');
        }
        let n = self.parse_uint()?;
        Ok(if neg { -n } else { n })
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.peek().is_none()
    }
}

// ---------------------------------------------------------------------------
// Ring descriptors.
// ---------------------------------------------------------------------------

/// Parse a ring descriptor such as `Z`, `Z/6`, `Z[X]/(X^2-1)` or
/// `Z/3 x Z/5`.
pub fn parse_ring(text: &str) -> Result<Ring> {
    let mut cur = Cursor::new(text);
    let ring = ring_expr(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.err("trailing input after ring descriptor"));
    }
    Ok(ring)
}

fn ring_expr(cur: &mut Cursor) -> Result<Ring> {
    let mut factors = vec![ring_term(cur)?];
    loop {
        cur.skip_ws();
        if cur.peek() == Some(b'x') {
            // product separator (the polynomial variable is uppercase X)
            cur.bump();
            factors.push(ring_term(cur)?);
        } else {
            break;
        }
    }
    if factors.len() == 1 {
        Ok(factors.pop().unwrap())
    } else {
        Ring::product(factors)
    }
}

fn ring_term(cur: &mut Cursor) -> Result<Ring> {
    cur.skip_ws();
    let mut ring = match cur.peek() {
        Some(b'Z') => {
            cur.bump();
            if cur.try_eat(b'/') {
                let n = cur.parse_uint()?;
                let n: num_bigint::BigUint = n.try_into().map_err(|_| cur.err("negative modulus"))?;
                Ring::integers_mod_big(n).map_err(|e| cur.err(e.to_string()))?
            } else {
                Ring::integers()
            }
        }
        Some(b'(') => {
            cur.bump();
            let inner = ring_expr(cur)?;
            cur.skip_ws();
            cur.eat(b')')?;
            inner
        }
        _ => return Err(cur.err(format!("expected a ring, found {}", cur.describe_current()))),
    };
    // postfix quotients: [X]/(poly)
    loop {
        cur.skip_ws();
        if cur.peek() != Some(b'[') {
            break;
        }
        cur.bump();
        cur.skip_ws();
        cur.eat(b'X')?;
        cur.skip_ws();
        cur.eat(b']')?;
        cur.skip_ws();
        cur.eat(b'/')?;
        cur.skip_ws();
        cur.eat(b'(')?;
        let coeffs = poly_body(cur, &ring)?;
        cur.skip_ws();
        cur.eat(b')')?;
        ring = Ring::quotient_poly(ring, coeffs).map_err(|e| cur.err(e.to_string()))?;
    }
    Ok(ring)
}

/// Polynomial in X with integer (or parenthesized base) coefficients,
/// returned as ascending coefficients over `base`.
fn poly_body(cur: &mut Cursor, base: &Ring) -> Result<Vec<RingElement>> {
    let mut terms: Vec<(usize, RingElement)> = Vec::new();
    let mut first = true;
    loop {
        cur.skip_ws();
        let sign = if cur.try_eat(b'-') {
            -1
        } else if cur.try_eat(b'+') {
            1
        } else if first {
            1
        } else {
            break;
        };
        first = false;
        cur.skip_ws();
        let mut coeff = None;
        if let Some(c) = cur.peek() {
            if c.is_ascii_digit() {
                coeff = Some(base.from_bigint(cur.parse_uint()?));
            } else if c == b'(' {
                coeff = Some(parse_element_inner(cur, base)?);
            }
        }
        cur.skip_ws();
        if coeff.is_some() {
            cur.try_eat(b'*');
            cur.skip_ws();
        }
        let (deg, c) = if cur.try_eat(b'X') {
            let deg = if cur.try_eat(b'^') {
                let d = cur.parse_uint()?;
                usize::try_from(d).map_err(|_| cur.err("degree too large"))?
            } else {
                1
            };
            (deg, coeff.unwrap_or_else(|| base.one()))
        } else {
            match coeff {
                Some(c) => (0, c),
                None => return Err(cur.err("expected a polynomial term")),
            }
        };
        let c = if sign < 0 { c.neg() } else { c };
        terms.push((deg, c));
    }
    if terms.is_empty() {
        return Err(cur.err("empty polynomial"));
    }
    let max_deg = terms.iter().map(|(d, _)| *d).max().unwrap();
    let mut coeffs = vec![base.zero(); max_deg + 1];
    for (d, c) in terms {
        coeffs[d] = coeffs[d].add(&c);
    }
    Ok(coeffs)
}

// ---------------------------------------------------------------------------
// Ring element literals.
// ---------------------------------------------------------------------------

/// Parse one element of the given ring: an integer for Z and Z/n, a
/// parenthesized polynomial for quotients, a parenthesized tuple for
/// products.
pub fn parse_ring_element(text: &str, ring: &Ring) -> Result<RingElement> {
    let mut cur = Cursor::new(text);
    cur.skip_ws();
    let e = parse_element_inner(&mut cur, ring)?;
    if !cur.at_end() {
        return Err(cur.err("trailing input after ring element"));
    }
    Ok(e)
}

fn parse_element_inner(cur: &mut Cursor, ring: &Ring) -> Result<RingElement> {
    cur.skip_ws();
    match cur.peek() {
        Some(c) if c.is_ascii_digit() || c == b'-' || c == b'+' => {
            Ok(ring.from_bigint(cur.parse_int()?))
        }
        Some(b'(') => {
            cur.bump();
            let e = match ring.kind() {
                RingKind::QuotientPoly { base, .. } => {
                    let base = base.clone();
                    let coeffs = poly_body(cur, &base)?;
                    ring.poly_from_coeffs(coeffs).map_err(|e| cur.err(e.to_string()))?
                }
                RingKind::Product(factors) => {
                    let factors = factors.to_vec();
                    let mut parts = Vec::with_capacity(factors.len());
                    for (i, f) in factors.iter().enumerate() {
                        if i > 0 {
                            cur.skip_ws();
                            cur.eat(b',')?;
                        }
                        parts.push(parse_element_inner(cur, f)?);
                    }
                    ring.tuple(parts).map_err(|e| cur.err(e.to_string()))?
                }
                _ => {
                    let e = parse_element_inner(cur, ring)?;
                    e
                }
            };
            cur.skip_ws();
            cur.eat(b')')?;
            Ok(e)
        }
        _ => Err(cur.err(format!("expected a ring element, found {}", cur.describe_current()))),
    }
}

// ---------------------------------------------------------------------------
// Clifford element expressions.
// ---------------------------------------------------------------------------

/// Parse `3 + 2*e{1} - e{1,2}` against an algebra; indices are 1-based and
/// must be strictly ascending inside each basis monomial.
pub fn parse_element(text: &str, algebra: &CliffordAlgebra) -> Result<CliffordElement> {
    let mut cur = Cursor::new(text);
    let ring = algebra.ring().clone();
    let mut acc = algebra.zero();
    let mut first = true;
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            if first {
                return Err(cur.err("empty element"));
            }
            break;
        }
        let sign = if cur.try_eat(b'-') {
            -1i64
        } else if cur.try_eat(b'+') {
            1
        } else if first {
            1
        } else {
            return Err(cur.err(format!("expected '+' or '-', found {}", cur.describe_current())));
        };
        first = false;
        cur.skip_ws();
        // coefficient (optional when the term is a bare basis monomial)
        let mut coeff: Option<RingElement> = None;
        match cur.peek() {
            Some(c) if c.is_ascii_digit() => {
                coeff = Some(ring.from_bigint(cur.parse_uint()?));
            }
            Some(b'(') => {
                coeff = Some(parse_element_inner(&mut cur, &ring)?);
            }
            _ => {}
        }
        cur.skip_ws();
        if coeff.is_some() {
            cur.try_eat(b'*');
            cur.skip_ws();
        }
        let mask = if cur.peek() == Some(b'e') {
            cur.bump();
            cur.eat(b'{')?;
            let mut mask: Mask = 0;
            let mut prev: Option<usize> = None;
            cur.skip_ws();
            if cur.peek() != Some(b'}') {
                loop {
                    cur.skip_ws();
                    let idx = cur.parse_uint()?;
                    let idx = usize::try_from(idx).map_err(|_| cur.err("index too large"))?;
                    if idx == 0 || idx > algebra.rank() {
                        return Err(cur.err(format!(
                            "basis index {} out of range 1..={}",
                            idx,
                            algebra.rank()
                        )));
                    }
                    if let Some(p) = prev {
                        if idx <= p {
                            return Err(cur.err("basis indices must be strictly ascending"));
                        }
                    }
                    prev = Some(idx);
                    mask |= 1 << (idx - 1);
                    cur.skip_ws();
                    if !cur.try_eat(b',') {
                        break;
                    }
                }
            }
            cur.eat(b'}')?;
            Some(mask)
        } else {
            None
        };
        let term = match (coeff, mask) {
            (Some(c), Some(m)) => algebra.basis(m).scale(&c),
            (Some(c), None) => algebra.scalar(c),
            (None, Some(m)) => algebra.basis(m),
            (None, None) => {
                return Err(cur.err(format!(
                    "expected a coefficient or basis monomial, found {}",
                    cur.describe_current()
                )))
            }
        };
        acc = if sign < 0 { acc.sub(&term) } else { acc.add(&term) };
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Configuration blocks.
// ---------------------------------------------------------------------------

/// A parsed configuration: the base ring, and the quadratic module when
/// rank/qdiag are present.
#[derive(Clone, Debug)]
pub struct Config {
    pub ring: Ring,
    pub module: Option<QuadraticModule>,
}

impl Config {
    pub fn require_module(&self) -> Result<&QuadraticModule> {
        self.module
            .as_ref()
            .ok_or_else(|| Error::Invalid("this command needs rank and qdiag in the config".into()))
    }
}

/// Parse `ring="Z/6" rank=1 qdiag=[1]` with an optional
/// `gram=[[...],...]`; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut cur = Cursor::new(text);
    let mut ring_str: Option<String> = None;
    let mut rank: Option<usize> = None;
    let mut qdiag: Option<Vec<BigInt>> = None;
    let mut gram: Option<Vec<Vec<BigInt>>> = None;
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            break;
        }
        let key = parse_key(&mut cur)?;
        cur.skip_ws();
        cur.eat(b'=')?;
        cur.skip_ws();
        match key.as_str() {
            "ring" => {
                cur.eat(b'"')?;
                let mut s = String::new();
                loop {
                    match cur.bump() {
                        Some(b'"') => break,
                        Some(c) => s.push(c as char),
                        None => return Err(cur.err("unterminated string")),
                    }
                }
                ring_str = Some(s);
            }
            "rank" => {
                let n = cur.parse_uint()?;
                rank = Some(usize::try_from(n).map_err(|_| cur.err("rank too large"))?);
            }
            "qdiag" => {
                qdiag = Some(parse_int_list(&mut cur)?);
            }
            "gram" => {
                gram = Some(parse_int_matrix(&mut cur)?);
            }
            other => {
                return Err(cur.err(format!("unknown config key '{}'", other)));
            }
        }
    }
    let ring_str = ring_str.ok_or_else(|| Error::Invalid("config needs a ring".into()))?;
    let ring = parse_ring(&ring_str)?;
    let module = match (rank, qdiag) {
        (Some(n), Some(qs)) => {
            if qs.len() != n {
                return Err(Error::Invalid(format!(
                    "qdiag has {} entries but rank is {}",
                    qs.len(),
                    n
                )));
            }
            let qdiag: Vec<RingElement> = qs.into_iter().map(|v| ring.from_bigint(v)).collect();
            let gram = match gram {
                Some(rows) => {
                    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                        return Err(Error::Invalid("gram must be rank x rank".into()));
                    }
                    let rows: Vec<Vec<RingElement>> = rows
                        .into_iter()
                        .map(|r| r.into_iter().map(|v| ring.from_bigint(v)).collect())
                        .collect();
                    Some(Matrix::from_rows(ring.clone(), rows))
                }
                None => None,
            };
            Some(QuadraticModule::new(ring.clone(), qdiag, gram)?)
        }
        (None, None) => None,
        _ => {
            return Err(Error::Invalid("rank and qdiag must be given together".into()));
        }
    };
    Ok(Config { ring, module })
}

fn parse_key(cur: &mut Cursor) -> Result<String> {
    let mut s = String::new();
    while let Some(c) = cur.peek() {
        if c.is_ascii_alphanumeric() || c == b'_' {
            s.push(c as char);
            cur.bump();
        } else {
            break;
        }
    }
    if s.is_empty() {
        return Err(cur.err(format!("expected a key, found {}", cur.describe_current())));
    }
    Ok(s)
}

fn parse_int_list(cur: &mut Cursor) -> Result<Vec<BigInt>> {
    cur.eat(b'[')?;
    let mut out = Vec::new();
    cur.skip_ws();
    if cur.peek() != Some(b']') {
        loop {
            cur.skip_ws();
            out.push(cur.parse_int()?);
            cur.skip_ws();
            if !cur.try_eat(b',') {
                break;
            }
        }
    }
    cur.eat(b']')?;
    Ok(out)
}

fn parse_int_matrix(cur: &mut Cursor) -> Result<Vec<Vec<BigInt>>> {
    cur.eat(b'[')?;
    let mut out = Vec::new();
    cur.skip_ws();
    if cur.peek() != Some(b']') {
        loop {
            cur.skip_ws();
            out.push(parse_int_list(cur)?);
            cur.skip_ws();
            if !cur.try_eat(b',') {
                break;
            }
        }
    }
    cur.eat(b']')?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ring_grammar() {
        assert_eq!(parse_ring("Z").unwrap(), Ring::integers());
        assert_eq!(parse_ring("Z/6").unwrap(), Ring::integers_mod(6).unwrap());
        let p = parse_ring("Z/3 x Z/5").unwrap();
        assert_eq!(p, Ring::product(vec![
            Ring::integers_mod(3).unwrap(),
            Ring::integers_mod(5).unwrap()
        ]).unwrap());
        let q = parse_ring("Z[X]/(X^2-1)").unwrap();
        let z = Ring::integers();
        assert_eq!(
            q,
            Ring::quotient_poly(z.clone(), vec![z.from_i64(-1), z.zero(), z.one()]).unwrap()
        );
        // display round-trips back to an equal descriptor
        for s in ["Z", "Z/6", "Z[X]/(X^2-1)", "Z/3 x Z/5", "Z/2[X]/(X^2)", "(Z/3 x Z/5)[X]/(X^2+1)"] {
            let r = parse_ring(s).unwrap();
            assert_eq!(parse_ring(&r.to_string()).unwrap(), r, "roundtrip of {}", s);
        }
    }

    #[test]
    fn ring_errors_have_positions() {
        match parse_ring("Z/") {
            Err(Error::Parse { line: 1, col, .. }) => assert!(col >= 2),
            other => panic!("expected a parse error, got {:?}", other),
        }
        assert!(parse_ring("Q").is_err());
        assert!(parse_ring("Z x").is_err());
    }

    #[test]
    fn config_examples() {
        let c = parse_config("ring=\"Z/6\" rank=1 qdiag=[1]").unwrap();
        assert_eq!(c.ring, Ring::integers_mod(6).unwrap());
        let m = c.module.unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(*m.gram().at(0, 0), c.ring.from_i64(2));
        // non-symmetric gram rejected
        let bad = parse_config("ring=\"Z\" rank=2 qdiag=[1,1] gram=[[2,1],[0,2]]");
        assert!(bad.is_err());
        // gram diagonal must be 2 qdiag
        let bad = parse_config("ring=\"Z\" rank=1 qdiag=[1] gram=[[3]]");
        assert!(bad.is_err());
        // comments and newlines
        let c = parse_config("# module\nring=\"Z\"\nrank=2\nqdiag=[0,1]\n").unwrap();
        assert_eq!(c.module.unwrap().rank(), 2);
    }

    #[test]
    fn element_parsing() {
        let ring = Ring::integers();
        let m = QuadraticModule::new(ring.clone(), vec![ring.from_i64(3), ring.one()], None).unwrap();
        let c = CliffordAlgebra::new(m).unwrap();
        let a = parse_element("3 + 2*e{1} - e{1,2}", &c).unwrap();
        assert_eq!(a.coeff(0), &ring.from_i64(3));
        assert_eq!(a.coeff(1), &ring.from_i64(2));
        assert_eq!(a.coeff(3), &ring.from_i64(-1));
        assert_eq!(parse_element("e{}", &c).unwrap(), c.one());
        assert!(parse_element("e{2,1}", &c).is_err());
        assert!(parse_element("e{3}", &c).is_err());
        // canonical print-parse loop
        assert_eq!(parse_element(&a.to_string(), &c).unwrap(), a);
    }

    #[test]
    fn element_parsing_composite_coefficients() {
        let rx = parse_ring("Z[X]/(X^2-1)").unwrap();
        let m = QuadraticModule::new(rx.clone(), vec![rx.one()], None).unwrap();
        let c = CliffordAlgebra::new(m).unwrap();
        let x = rx.poly_gen().unwrap();
        let a = c.scalar(x.clone()).add(&c.generator(0).scale(&rx.from_i64(2)));
        let s = a.to_string();
        assert_eq!(parse_element(&s, &c).unwrap(), a);

        let pr = parse_ring("Z/3 x Z/5").unwrap();
        let m = QuadraticModule::new(pr.clone(), vec![pr.one()], None).unwrap();
        let c = CliffordAlgebra::new(m).unwrap();
        let t = pr
            .tuple(vec![
                Ring::integers_mod(3).unwrap().from_i64(2),
                Ring::integers_mod(5).unwrap().from_i64(3),
            ])
            .unwrap();
        let a = c.scalar(t.clone()).add(&c.generator(0).scale(&t));
        assert_eq!(parse_element(&a.to_string(), &c).unwrap(), a);
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip_z(coeffs in proptest::collection::vec(-20i64..20, 4)) {
            let ring = Ring::integers();
            let m = QuadraticModule::new(ring.clone(), vec![ring.zero(), ring.one()], None).unwrap();
            let c = CliffordAlgebra::new(m).unwrap();
            let elem = c.from_coeffs(coeffs.iter().map(|&v| ring.from_i64(v)).collect());
            let printed = elem.to_string();
            let parsed = parse_element(&printed, &c).unwrap();
            prop_assert_eq!(parsed, elem.clone());
            // printing is canonical and stable
            prop_assert_eq!(parse_element(&printed, &c).unwrap().to_string(), printed);
        }

        #[test]
        fn print_parse_roundtrip_z6(coeffs in proptest::collection::vec(0i64..6, 4)) {
            let ring = Ring::integers_mod(6).unwrap();
            let m = QuadraticModule::new(ring.clone(), vec![ring.from_i64(1), ring.from_i64(3)], None).unwrap();
            let c = CliffordAlgebra::new(m).unwrap();
            let elem = c.from_coeffs(coeffs.iter().map(|&v| ring.from_i64(v)).collect());
            let printed = elem.to_string();
            prop_assert_eq!(parse_element(&printed, &c).unwrap(), elem);
        }
    }
}
