//! Recursive-descent parser turning expression text into exact rational
//! functions of `t`.
//!
//! Grammar, loosest binding first (`*`, `/`, `+`, `-` associate left):
//!
//! ```text
//!     expr   := term  { ('+' | '-') term }
//!     term   := unary { ('*' | '/') unary  |  power }     (juxtaposition)
//!     unary  := '-' unary | power
//!     power  := atom [ '^' ['-'] integer ]
//!     atom   := integer | 't' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-t^2` means `-(t^2)` — the usual
//! mathematical reading. Juxtaposition (`3t`, `2(1+t)`, `(1+t)(1-t)`)
//! multiplies at the same precedence as `*`; a juxtaposed factor is never
//! signed (`4-3t` is a subtraction) and never starts with a digit (`t2` is
//! rejected rather than read as `t*2`). Exponents must be integer literals,
//! negative allowed; constants are integers or quotients like `5/3`, never
//! decimals. `t` is the only variable.

use funeq_core::{Error, Rat, RationalFunction, Result};

/// Parse an expression in the variable `t` into a reduced rational function.
///
/// Errors carry the byte offset at which parsing failed: `Syntax` for an
/// unexpected character, `NonIntegerExponent` when `^` is not followed by an
/// integer literal, and `DivisionByZeroPolynomial` when the expression
/// divides by something identically zero.
pub fn parse_expression(src: &str) -> Result<RationalFunction> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.err("an expression"));
    }
    let value = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.err("end of input"));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r')) {
            self.bump();
        }
    }

    fn err(&self, expected: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            expected: expected.to_string(),
        }
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Some(b'/') => {
                    self.bump();
                    acc = acc.div(&self.unary()?)?;
                }
                // juxtaposed factor: unsigned, so a following '-' stays a
                // subtraction and a following digit is a syntax error
                Some(b't') | Some(b'(') => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        self.skip_ws();
        if self.peek() == Some(b'-') {
            self.bump();
            Ok(self.unary()?.neg())
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.bump();
        self.skip_ws();
        let negative = if self.peek() == Some(b'-') {
            self.bump();
            self.skip_ws();
            true
        } else {
            false
        };
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == start {
            return Err(Error::NonIntegerExponent(start));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let exponent: i64 = digits.parse().map_err(|_| Error::Syntax {
            position: start,
            expected: "an exponent fitting in a 64-bit integer".to_string(),
        })?;
        base.pow(if negative { -exponent } else { exponent })
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        self.skip_ws();
        match self.peek() {
            Some(b't') => {
                self.bump();
                Ok(RationalFunction::t())
            }
            Some(b'(') => {
                self.bump();
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() == Some(b')') {
                    self.bump();
                    Ok(inner)
                } else {
                    Err(self.err("')'"))
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
                let digits = &self.src[start..self.pos];
                let mut value = Rat::zero();
                for &d in digits {
                    value = value * &Rat::from_int(10) + &Rat::from_int((d - b'0') as i64);
                }
                Ok(RationalFunction::constant(value))
            }
            _ => Err(self.err("an integer, 't', '-', or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use funeq_core::Polynomial;

    fn rf(src: &str) -> RationalFunction {
        parse_expression(src).unwrap()
    }

    fn poly(coeffs: &[i64]) -> RationalFunction {
        RationalFunction::from_poly(Polynomial::from_ints(coeffs))
    }

    #[test]
    fn parses_reference_expressions() {
        assert_eq!(rf("t^2+t^3"), poly(&[0, 0, 1, 1]));
        assert_eq!(
            rf("t^2/(4-3t)"),
            poly(&[0, 0, 1]).div(&poly(&[4, -3])).unwrap()
        );
        let green_a = poly(&[2, 1])
            .mul(&poly(&[4, -3]))
            .div(&poly(&[4, 1]).mul(&poly(&[2, -1])))
            .unwrap();
        assert_eq!(rf("(2+t)*(4-3*t)/((4+t)*(2-t))"), green_a);
    }

    #[test]
    fn exponent_binds_tighter_than_unary_minus() {
        assert_eq!(rf("-t^2"), poly(&[0, 0, -1]));
        assert_eq!(rf("(-t)^2"), poly(&[0, 0, 1]));
        assert_eq!(rf("-2^2"), RationalFunction::constant(Rat::from_int(-4)));
    }

    #[test]
    fn standard_precedence_and_associativity() {
        assert_eq!(rf("1-2-3"), RationalFunction::constant(Rat::from_int(-4)));
        assert_eq!(rf("1/2*t"), poly(&[0, 1]).scale(&Rat::frac(1, 2)));
        assert_eq!(rf("2+3*t"), poly(&[2, 3]));
        assert_eq!(rf("2*t^2"), poly(&[0, 0, 2]));
        assert_eq!(rf("(2*t)^2"), poly(&[0, 0, 4]));
        assert_eq!(rf("2*-3"), RationalFunction::constant(Rat::from_int(-6)));
    }

    #[test]
    fn juxtaposition_multiplies() {
        assert_eq!(rf("3t"), poly(&[0, 3]));
        assert_eq!(rf("4-3t"), poly(&[4, -3]));
        assert_eq!(rf("2(1+t)"), poly(&[2, 2]));
        assert_eq!(rf("(1+t)(1-t)"), poly(&[1, 0, -1]));
        assert_eq!(rf("3t^2"), poly(&[0, 0, 3]));
        assert_eq!(rf("t(1+t)"), poly(&[0, 1, 1]));
    }

    #[test]
    fn negative_and_big_exponents() {
        assert_eq!(rf("t^-1"), RationalFunction::one().div(&poly(&[0, 1])).unwrap());
        assert_eq!(rf("2^-2"), RationalFunction::constant(Rat::frac(1, 4)));
        // 10^40 needs arbitrary-precision integer literals as well
        let big = rf("10000000000000000000000000000000000000000");
        assert_eq!(big, RationalFunction::constant(Rat::from_int(10).pow(40).unwrap()));
    }

    #[test]
    fn rational_constants_reduce() {
        assert_eq!(rf("6/4"), RationalFunction::constant(Rat::frac(3, 2)));
        assert_eq!(rf("5/3"), RationalFunction::constant(Rat::frac(5, 3)));
    }

    #[test]
    fn print_parse_roundtrip_is_identity() {
        let samples = [
            "t^2/(4-3t)",
            "(2+t)*(4-3*t)/((4+t)*(2-t))",
            "t^2+t^3",
            "t/(1+t^2)",
            "-t^2",
            "1/2*t^2 - 3*t + 7/5",
            "t^2/(1-2t+2t^2)",
            "(1+t)/t",
        ];
        for src in samples {
            let first = rf(src);
            let printed = first.to_string();
            let second = parse_expression(&printed)
                .unwrap_or_else(|e| panic!("reparse of {printed:?} failed: {e}"));
            assert_eq!(first, second, "round-trip changed value for {src:?}");
            assert_eq!(printed, second.to_string());
        }
    }

    #[test]
    fn malformed_inputs_fail_with_positions() {
        let cases: &[(&str, usize)] = &[
            ("", 0),          // empty
            ("   ", 3),       // blank
            ("+", 0),         // leading binary operator
            ("t+", 2),        // dangling operator
            ("(t", 2),        // unclosed parenthesis
            ("t)", 1),        // stray close
            ("2..", 1),       // decimals are not constants
            ("x", 0),         // unknown variable
            ("t 2", 2),       // digit cannot be juxtaposed
            ("t^2^3", 3),     // chained exponent is ambiguous, rejected
            ("t^99999999999999999999", 2), // exponent overflows 64 bits
            ("1 + (2*t))", 9), // unbalanced close
            ("t*", 2),        // dangling multiply
            ("()", 1),        // empty group
        ];
        for &(src, pos) in cases {
            match parse_expression(src) {
                Err(Error::Syntax { position, .. }) => {
                    assert_eq!(position, pos, "wrong position for {src:?}");
                }
                other => panic!("expected syntax error for {src:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn exponent_and_division_errors() {
        assert!(matches!(
            parse_expression("t^t"),
            Err(Error::NonIntegerExponent(2))
        ));
        assert!(matches!(
            parse_expression("t^(2)"),
            Err(Error::NonIntegerExponent(2))
        ));
        assert!(matches!(
            parse_expression("1/0"),
            Err(Error::DivisionByZeroPolynomial)
        ));
        assert!(matches!(
            parse_expression("t/(t-t)"),
            Err(Error::DivisionByZeroPolynomial)
        ));
        assert!(matches!(
            parse_expression("0^-1"),
            Err(Error::DivisionByZeroPolynomial)
        ));
    }

    #[test]
    fn double_negation_and_whitespace() {
        assert_eq!(rf("--t"), poly(&[0, 1]));
        assert_eq!(rf("  t ^ 2  /  ( 4 - 3 t )"), rf("t^2/(4-3t)"));
    }

    mod roundtrip {
        use super::*;
        use funeq_core::Rat;
        use proptest::prelude::*;

        /// A random expression tree, rendered with explicit parentheses and
        /// evaluated independently of the parser.
        #[derive(Clone, Debug)]
        enum Ast {
            Int(i64),
            T,
            Neg(Box<Ast>),
            Add(Box<Ast>, Box<Ast>),
            Sub(Box<Ast>, Box<Ast>),
            Mul(Box<Ast>, Box<Ast>),
            Div(Box<Ast>, Box<Ast>),
            Pow(Box<Ast>, i64),
        }

        fn render(ast: &Ast) -> String {
            match ast {
                Ast::Int(n) => n.to_string(),
                Ast::T => "t".to_string(),
                Ast::Neg(x) => format!("-({})", render(x)),
                Ast::Add(l, r) => format!("({}+{})", render(l), render(r)),
                Ast::Sub(l, r) => format!("({}-{})", render(l), render(r)),
                Ast::Mul(l, r) => format!("({}*{})", render(l), render(r)),
                Ast::Div(l, r) => format!("({}/{})", render(l), render(r)),
                Ast::Pow(b, e) => format!("({})^{}", render(b), e),
            }
        }

        /// Evaluate with the same field operations the parser uses; `None`
        /// marks trees the parser is expected to reject (division by the
        /// zero polynomial, negative powers of valuation > 0).
        fn eval(ast: &Ast) -> Option<RationalFunction> {
            match ast {
                Ast::Int(n) => Some(RationalFunction::constant(Rat::from_int(*n))),
                Ast::T => Some(RationalFunction::from_poly(Polynomial::from_ints(&[0, 1]))),
                Ast::Neg(x) => Some(eval(x)?.neg()),
                Ast::Add(l, r) => Some(eval(l)?.add(&eval(r)?)),
                Ast::Sub(l, r) => Some(eval(l)?.sub(&eval(r)?)),
                Ast::Mul(l, r) => Some(eval(l)?.mul(&eval(r)?)),
                Ast::Div(l, r) => eval(l)?.div(&eval(r)?).ok(),
                Ast::Pow(b, e) => eval(b)?.pow(*e).ok(),
            }
        }

        fn ast() -> impl Strategy<Value = Ast> {
            let leaf = prop_oneof![(-9i64..=9).prop_map(Ast::Int), Just(Ast::T)];
            leaf.prop_recursive(4, 24, 3, |inner| {
                prop_oneof![
                    inner.clone().prop_map(|x| Ast::Neg(Box::new(x))),
                    (inner.clone(), inner.clone())
                        .prop_map(|(l, r)| Ast::Add(Box::new(l), Box::new(r))),
                    (inner.clone(), inner.clone())
                        .prop_map(|(l, r)| Ast::Sub(Box::new(l), Box::new(r))),
                    (inner.clone(), inner.clone())
                        .prop_map(|(l, r)| Ast::Mul(Box::new(l), Box::new(r))),
                    (inner.clone(), inner.clone())
                        .prop_map(|(l, r)| Ast::Div(Box::new(l), Box::new(r))),
                    (inner, -2i64..=3).prop_map(|(b, e)| Ast::Pow(Box::new(b), e)),
                ]
            })
        }

        proptest! {
            #[test]
            fn rendered_trees_parse_back_to_their_value(tree in ast()) {
                match eval(&tree) {
                    Some(expected) => {
                        let parsed = parse_expression(&render(&tree)).unwrap();
                        prop_assert_eq!(&parsed, &expected);
                        // and the canonical printed form parses to the same value
                        let reparsed = parse_expression(&parsed.to_string()).unwrap();
                        prop_assert_eq!(&reparsed, &expected);
                    }
                    None => {
                        prop_assert!(parse_expression(&render(&tree)).is_err());
                    }
                }
            }
        }
    }
}
