//! Small real-valued expression grammar for weights, defining inequalities
//! and lower candidates.
//!
//! Atoms are numbers and the coordinate accessors `abs(zK)`, `re(zK)`,
//! `im(zK)` (1-based coordinates). On top of those: `+ - * /`, unary minus,
//! `log`, `exp`, `sqrt`, `abs`, and binary `min` / `max`.
//!
//! Evaluation is total and deterministic. Out-of-domain cases follow IEEE
//! semantics and are handled downstream as documented in the README:
//! `log(x)` for `x <= 0` is minus infinity (weights clamp at their floor,
//! inequalities treat it as deeply satisfied), division by zero gives a
//! signed infinity or NaN, `sqrt` of a negative number gives NaN, and any
//! NaN makes a membership test false and a weight clamp.

use num_complex::Complex;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    CoordAbs(usize),
    CoordRe(usize),
    CoordIm(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Log(Box<Expr>),
    Exp(Box<Expr>),
    Sqrt(Box<Expr>),
    Abs(Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Total evaluation; coordinates out of range give NaN.
    pub fn eval(&self, z: &[Complex<f64>]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::CoordAbs(i) => z.get(*i).map_or(f64::NAN, |c| c.norm()),
            Expr::CoordRe(i) => z.get(*i).map_or(f64::NAN, |c| c.re),
            Expr::CoordIm(i) => z.get(*i).map_or(f64::NAN, |c| c.im),
            Expr::Neg(a) => -a.eval(z),
            Expr::Add(a, b) => a.eval(z) + b.eval(z),
            Expr::Sub(a, b) => a.eval(z) - b.eval(z),
            Expr::Mul(a, b) => a.eval(z) * b.eval(z),
            Expr::Div(a, b) => a.eval(z) / b.eval(z),
            Expr::Log(a) => {
                let v = a.eval(z);
                if v > 0.0 {
                    v.ln()
                } else if v.is_nan() {
                    f64::NAN
                } else {
                    f64::NEG_INFINITY
                }
            }
            Expr::Exp(a) => a.eval(z).exp(),
            Expr::Sqrt(a) => a.eval(z).sqrt(),
            Expr::Abs(a) => a.eval(z).abs(),
            Expr::Min(a, b) => {
                let (x, y) = (a.eval(z), b.eval(z));
                if x.is_nan() || y.is_nan() {
                    f64::NAN
                } else {
                    x.min(y)
                }
            }
            Expr::Max(a, b) => {
                let (x, y) = (a.eval(z), b.eval(z));
                if x.is_nan() || y.is_nan() {
                    f64::NAN
                } else {
                    x.max(y)
                }
            }
        }
    }

    /// Canonical text form; parsing it back yields an equal tree.
    pub fn print(&self) -> String {
        match self {
            Expr::Num(v) => format!("{v}"),
            Expr::CoordAbs(i) => format!("abs(z{})", i + 1),
            Expr::CoordRe(i) => format!("re(z{})", i + 1),
            Expr::CoordIm(i) => format!("im(z{})", i + 1),
            Expr::Neg(a) => format!("(-{})", a.print()),
            Expr::Add(a, b) => format!("({} + {})", a.print(), b.print()),
            Expr::Sub(a, b) => format!("({} - {})", a.print(), b.print()),
            Expr::Mul(a, b) => format!("({} * {})", a.print(), b.print()),
            Expr::Div(a, b) => format!("({} / {})", a.print(), b.print()),
            Expr::Log(a) => format!("log({})", a.print()),
            Expr::Exp(a) => format!("exp({})", a.print()),
            Expr::Sqrt(a) => format!("sqrt({})", a.print()),
            Expr::Abs(a) => format!("abs({})", a.print()),
            Expr::Min(a, b) => format!("min({}, {})", a.print(), b.print()),
            Expr::Max(a, b) => format!("max({}, {})", a.print(), b.print()),
        }
    }

    /// True when the value depends only on coordinate moduli, so it is
    /// invariant under a common phase rotation.
    pub fn phase_invariant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::CoordAbs(_) => true,
            Expr::CoordRe(_) | Expr::CoordIm(_) => false,
            Expr::Neg(a) | Expr::Log(a) | Expr::Exp(a) | Expr::Sqrt(a) | Expr::Abs(a) => {
                a.phase_invariant()
            }
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Min(a, b)
            | Expr::Max(a, b) => a.phase_invariant() && b.phase_invariant(),
        }
    }

    /// Number of coordinates the expression requires.
    pub fn min_dimension(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::CoordAbs(i) | Expr::CoordRe(i) | Expr::CoordIm(i) => i + 1,
            Expr::Neg(a) | Expr::Log(a) | Expr::Exp(a) | Expr::Sqrt(a) | Expr::Abs(a) => {
                a.min_dimension()
            }
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Min(a, b)
            | Expr::Max(a, b) => a.min_dimension().max(b.min_dimension()),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> ParseError {
        ParseError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            if self.eat(b'+') {
                let rhs = self.term()?;
                lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            self.skip_ws();
            if self.eat(b'*') {
                let rhs = self.unary()?;
                lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'/') {
                let rhs = self.unary()?;
                lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        if self.eat(b'-') {
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_lowercase() => self.call(),
            _ => Err(self.err("expected a number, function call or `(`")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
            self.pos += 1;
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // Not an exponent; backtrack (e.g. `2e` would be malformed
                // anyway, but `2` followed by an identifier is a syntax error
                // caught later).
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>().map(Expr::Num).map_err(|_| ParseError {
            offset: start,
            message: format!("malformed number `{text}`"),
        })
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit()) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn coordinate(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let name = self.ident();
        if let Some(rest) = name.strip_prefix('z') {
            if let Ok(k) = rest.parse::<usize>() {
                if k >= 1 {
                    return Ok(k - 1);
                }
            }
        }
        Err(ParseError {
            offset: start,
            message: format!("expected a coordinate like `z1`, got `{name}`"),
        })
    }

    fn call(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let name = self.ident();
        self.skip_ws();
        self.expect(b'(')?;
        let node = match name.as_str() {
            "abs" | "re" | "im" => {
                // Coordinate accessor when the argument is a bare coordinate;
                // `abs` also accepts a general subexpression.
                let mark = self.pos;
                if let Ok(k) = self.coordinate() {
                    self.skip_ws();
                    if self.peek() == Some(b')') {
                        self.pos += 1;
                        return Ok(match name.as_str() {
                            "abs" => Expr::CoordAbs(k),
                            "re" => Expr::CoordRe(k),
                            _ => Expr::CoordIm(k),
                        });
                    }
                    self.pos = mark;
                } else {
                    self.pos = mark;
                }
                if name != "abs" {
                    return Err(ParseError {
                        offset: self.pos,
                        message: format!("`{name}` expects a coordinate like `z1`"),
                    });
                }
                let a = self.expr()?;
                self.skip_ws();
                self.expect(b')')?;
                return Ok(Expr::Abs(Box::new(a)));
            }
            "log" | "exp" | "sqrt" => {
                let a = self.expr()?;
                let node = match name.as_str() {
                    "log" => Expr::Log(Box::new(a)),
                    "exp" => Expr::Exp(Box::new(a)),
                    _ => Expr::Sqrt(Box::new(a)),
                };
                self.skip_ws();
                self.expect(b')')?;
                node
            }
            "min" | "max" => {
                let mut args = vec![self.expr()?];
                loop {
                    self.skip_ws();
                    if self.eat(b',') {
                        args.push(self.expr()?);
                    } else {
                        break;
                    }
                }
                self.expect(b')')?;
                if args.len() < 2 {
                    return Err(ParseError {
                        offset: start,
                        message: format!("`{name}` needs at least two arguments"),
                    });
                }
                let fold = |a: Expr, b: Expr| {
                    if name == "min" {
                        Expr::Min(Box::new(a), Box::new(b))
                    } else {
                        Expr::Max(Box::new(a), Box::new(b))
                    }
                };
                let mut it = args.into_iter();
                let first = it.next().unwrap();
                it.fold(first, fold)
            }
            other => {
                return Err(ParseError {
                    offset: start,
                    message: format!("unknown identifier `{other}`"),
                })
            }
        };
        Ok(node)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, z: &[(f64, f64)]) -> f64 {
        let zz: Vec<Complex<f64>> = z.iter().map(|&(r, i)| Complex::new(r, i)).collect();
        Expr::parse(src).unwrap().eval(&zz)
    }

    #[test]
    fn log_max_abs() {
        let v = ev(
            "log(max(abs(z1),abs(z2)))",
            &[(std::f64::consts::E, 0.0), (1.0, 0.0)],
        );
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_zero() {
        assert_eq!(ev("0", &[(1.0, 2.0)]), 0.0);
    }

    #[test]
    fn syntax_error_offset() {
        let e = Expr::parse("log(").unwrap_err();
        assert_eq!(e.offset, 4);
        let e = Expr::parse("boop(1)").unwrap_err();
        assert_eq!(e.offset, 0);
    }

    #[test]
    fn precedence_and_unary() {
        assert_eq!(ev("1 + 2 * 3", &[]), 7.0);
        assert_eq!(ev("(1 + 2) * 3", &[]), 9.0);
        assert_eq!(ev("-2 * 3 - 1", &[]), -7.0);
        assert_eq!(ev("4 / 2 / 2", &[]), 1.0);
        assert_eq!(ev("1.5e2", &[]), 150.0);
    }

    #[test]
    fn sentinels() {
        assert_eq!(ev("log(0)", &[]), f64::NEG_INFINITY);
        assert_eq!(ev("log(0 - 1)", &[]), f64::NEG_INFINITY);
        assert!(ev("sqrt(0 - 1)", &[]).is_nan());
        assert_eq!(ev("1 / 0", &[]), f64::INFINITY);
        assert!(ev("0 / 0", &[]).is_nan());
        assert!(ev("min(0 / 0, 1)", &[]).is_nan());
        assert!(ev("abs(z3)", &[(1.0, 0.0)]).is_nan());
    }

    #[test]
    fn print_parse_roundtrip() {
        let sources = [
            "log(max(abs(z1),abs(z2)))",
            "0",
            "min(abs(z1) - 1, 0.5 - im(z2), re(z1))",
            "sqrt(abs(z1)*abs(z1) + abs(z2)*abs(z2))",
            "exp(-abs(z1)) / (1 + abs(z2))",
            "max(1,2,3)",
        ];
        for src in sources {
            let e = Expr::parse(src).unwrap();
            let printed = e.print();
            let back = Expr::parse(&printed).unwrap();
            assert_eq!(back, e, "round trip changed `{src}` -> `{printed}`");
        }
    }

    #[test]
    fn phase_invariance_detection() {
        assert!(Expr::parse("log(abs(z1)) + abs(z2)").unwrap().phase_invariant());
        assert!(!Expr::parse("re(z1)").unwrap().phase_invariant());
        assert_eq!(Expr::parse("abs(z2)").unwrap().min_dimension(), 2);
    }

    #[test]
    fn re_requires_coordinate() {
        assert!(Expr::parse("re(1 + 2)").is_err());
        assert!(Expr::parse("abs(1 + 2)").is_ok());
    }
}
