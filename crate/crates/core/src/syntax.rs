//! Text syntax for field elements, derivations, operators and words.
//!
//! ```text
//! op     := sum ('o' sum)*
//! sum    := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ['^' nonneg-int]
//! atom   := rational | 't' index | 'd' '[' int (',' int)* ']' | 'id'
//!         | '(' op ')' | '(' derivation ')' | '-' factor
//! rational   := int ['/' positive-int]
//! derivation := 't' index '->' sum ((',' | ';') 't' index '->' sum)*
//! ```
//!
//! `d[j1,...,jk]` is the partial derivative `d^(j1..jk)`, `id` the identity
//! map, and `o` composition (right operand applied first; loosest binding).
//! `*` and `/` scale an operator by a field element on either side; two
//! operators are never multiplied. A bare derivation literal
//! `t1 -> g1; t2 -> g2` may also stand alone as a whole input. Whitespace is
//! insignificant.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::deriv::{Derivation, DiffOp, OpWord};
use crate::error::{Error, Result};
use crate::exactnum::{MultiIndex, RatFunc};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(usize),
    D,
    Id,
    Compose,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("integer {n}"),
        Tok::Var(i) => format!("variable t{i}"),
        Tok::D => "'d'".into(),
        Tok::Id => "'id'".into(),
        Tok::Compose => "'o'".into(),
        Tok::Arrow => "'->'".into(),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Slash => "'/'".into(),
        Tok::Caret => "'^'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::LBracket => "'['".into(),
        Tok::RBracket => "']'".into(),
        Tok::Comma => "','".into(),
        Tok::Semi => "';'".into(),
        Tok::End => "end of input".into(),
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str, nvars: usize) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((Tok::Int(n), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            let tok = match word {
                "d" => Tok::D,
                "id" => Tok::Id,
                "o" => Tok::Compose,
                _ if word.len() > 1
                    && word.starts_with('t')
                    && word[1..].bytes().all(|b| b.is_ascii_digit()) =>
                {
                    let index: usize = word[1..]
                        .parse()
                        .map_err(|_| syntax(start, "variable index too large"))?;
                    if index == 0 || index > nvars {
                        return Err(Error::UnknownVariable { index, nvars });
                    }
                    Tok::Var(index)
                }
                _ => return Err(syntax(start, format!("unknown identifier '{word}'"))),
            };
            out.push((tok, start));
            continue;
        }
        let tok = match c {
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b',' => Tok::Comma,
            b';' => Tok::Semi,
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(syntax(start, format!("unexpected character '{ch}'")));
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// An operator with its word form, when it has one.
#[derive(Clone, Debug)]
struct OpVal {
    op: DiffOp,
    word: Option<OpWord>,
}

#[derive(Clone, Debug)]
enum Value {
    Scalar(RatFunc),
    Op(OpVal),
}

impl Value {
    fn into_op(self) -> OpVal {
        match self {
            Value::Op(o) => o,
            Value::Scalar(s) => OpVal {
                op: DiffOp::scalar(s.clone()),
                word: Some(OpWord::single(s, vec![]).expect("same ambient")),
            },
        }
    }
}

fn word_map(w: &OpWord, f: impl Fn(&RatFunc) -> RatFunc) -> OpWord {
    let mut out = OpWord::new(w.nvars());
    for (c, word) in w.terms() {
        out.push(f(c), word.clone()).expect("same ambient");
    }
    out
}

fn word_sum(a: &OpWord, b: &OpWord) -> OpWord {
    let mut out = a.clone();
    for (c, word) in b.terms() {
        out.push(c.clone(), word.clone()).expect("same ambient");
    }
    out
}

/// `a o b` as a word; only possible when `b`'s coefficients are constants,
/// which commute with every derivation.
fn word_compose(a: &OpWord, b: &OpWord) -> Option<OpWord> {
    if b.terms().iter().any(|(c, _)| c.constant_value().is_none()) {
        return None;
    }
    let mut out = OpWord::new(a.nvars());
    for (ca, wa) in a.terms() {
        for (cb, wb) in b.terms() {
            let mut w = wa.clone();
            w.extend(wb.iter().cloned());
            out.push(ca * cb, w).expect("same ambient");
        }
    }
    Some(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    nvars: usize,
}

impl Parser {
    fn new(text: &str, nvars: usize) -> Result<Self> {
        if nvars == 0 {
            return Err(Error::Domain("need at least one variable".into()));
        }
        Ok(Parser {
            toks: lex(text, nvars)?,
            pos: 0,
            nvars,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.offset(),
                format!("expected {}, found {}", describe(&want), describe(self.peek())),
            ))
        }
    }

    fn finish(&mut self) -> Result<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(syntax(
                self.offset(),
                format!("unexpected {}", describe(self.peek())),
            ))
        }
    }

    fn starts_derivation(&self) -> bool {
        matches!(self.peek(), Tok::Var(_)) && *self.peek_at(1) == Tok::Arrow
    }

    /// Entry point: a bare derivation literal or an operator expression.
    fn top(&mut self) -> Result<Value> {
        let v = if self.starts_derivation() {
            self.derivation_value()?
        } else {
            self.op()?
        };
        self.finish()?;
        Ok(v)
    }

    fn op(&mut self) -> Result<Value> {
        let mut lhs = self.sum()?;
        while *self.peek() == Tok::Compose {
            self.bump();
            let rhs = self.sum()?;
            let (a, b) = (lhs.into_op(), rhs.into_op());
            let word = match (&a.word, &b.word) {
                (Some(x), Some(y)) => word_compose(x, y),
                _ => None,
            };
            lhs = Value::Op(OpVal {
                op: a.op.compose(&b.op)?,
                word,
            });
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> Result<Value> {
        let mut lhs = self.term()?;
        loop {
            let negate = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            let rhs = if negate { neg(rhs) } else { rhs };
            lhs = match (lhs, rhs) {
                (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(&a + &b),
                (a, b) => {
                    let (a, b) = (a.into_op(), b.into_op());
                    let word = match (&a.word, &b.word) {
                        (Some(x), Some(y)) => Some(word_sum(x, y)),
                        _ => None,
                    };
                    Value::Op(OpVal {
                        op: a.op.add(&b.op)?,
                        word,
                    })
                }
            };
        }
    }

    fn term(&mut self) -> Result<Value> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    let at = self.offset();
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = match (lhs, rhs) {
                        (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(&a * &b),
                        (Value::Scalar(s), Value::Op(o)) | (Value::Op(o), Value::Scalar(s)) => {
                            Value::Op(scale(&o, &s))
                        }
                        (Value::Op(_), Value::Op(_)) => {
                            return Err(syntax(at, "cannot multiply two operators; use 'o' to compose"))
                        }
                    };
                }
                Tok::Slash => {
                    let at = self.offset();
                    self.bump();
                    let rhs = self.factor()?;
                    let Value::Scalar(s) = rhs else {
                        return Err(syntax(at, "cannot divide by an operator"));
                    };
                    let inv = s.recip()?;
                    lhs = match lhs {
                        Value::Scalar(a) => Value::Scalar(&a * &inv),
                        Value::Op(o) => Value::Op(scale(&o, &inv)),
                    };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Value> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let at = self.offset();
        self.bump();
        let e = match self.bump() {
            Tok::Int(n) => n
                .to_u32()
                .ok_or_else(|| syntax(at, "exponent too large"))?,
            t => return Err(syntax(at, format!("expected exponent, found {}", describe(&t)))),
        };
        match base {
            Value::Scalar(s) => Ok(Value::Scalar(s.pow(e))),
            Value::Op(_) => Err(syntax(at, "operators cannot be raised to powers; use 'o'")),
        }
    }

    fn atom(&mut self) -> Result<Value> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => {
                if *self.peek() == Tok::Slash && matches!(self.peek_at(1), Tok::Int(_)) {
                    self.bump();
                    let Tok::Int(d) = self.bump() else { unreachable!() };
                    if d.is_zero() {
                        return Err(Error::DivisionByZero);
                    }
                    Ok(Value::Scalar(RatFunc::constant(self.nvars, BigRational::new(n, d))))
                } else {
                    Ok(Value::Scalar(RatFunc::constant(self.nvars, BigRational::from_integer(n))))
                }
            }
            Tok::Var(i) => Ok(Value::Scalar(RatFunc::var(self.nvars, i - 1))),
            Tok::Minus => Ok(neg(self.factor()?)),
            Tok::Id => Ok(Value::Op(Value::Scalar(RatFunc::one(self.nvars)).into_op())),
            Tok::D => self.partial(),
            Tok::LParen => {
                let v = if self.starts_derivation() {
                    self.derivation_value()?
                } else {
                    self.op()?
                };
                self.expect(Tok::RParen)?;
                Ok(v)
            }
            t => Err(syntax(at, format!("unexpected {}", describe(&t)))),
        }
    }

    fn partial(&mut self) -> Result<Value> {
        self.expect(Tok::LBracket)?;
        let at = self.offset();
        let mut idx = Vec::new();
        loop {
            let here = self.offset();
            match self.bump() {
                Tok::Int(n) => idx.push(
                    n.to_u32()
                        .ok_or_else(|| syntax(here, "derivative order too large"))?,
                ),
                t => return Err(syntax(here, format!("expected integer, found {}", describe(&t)))),
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::RBracket)?;
        if idx.len() != self.nvars {
            return Err(syntax(
                at,
                format!("d[...] needs {} indices, found {}", self.nvars, idx.len()),
            ));
        }
        let n = self.nvars;
        let alpha = MultiIndex::new(idx);
        let word: Vec<Derivation> = (0..n)
            .flat_map(|i| std::iter::repeat_n(i, alpha.get(i) as usize))
            .map(|i| Derivation::partial(n, i))
            .collect();
        Ok(Value::Op(OpVal {
            op: DiffOp::partial(alpha),
            word: Some(OpWord::single(RatFunc::one(n), word)?),
        }))
    }

    fn derivation_value(&mut self) -> Result<Value> {
        let d = self.derivation_list()?;
        Ok(Value::Op(OpVal {
            op: d.to_diffop(),
            word: Some(OpWord::single(RatFunc::one(self.nvars), vec![d])?),
        }))
    }

    fn derivation_list(&mut self) -> Result<Derivation> {
        let mut images: Vec<Option<RatFunc>> = vec![None; self.nvars];
        loop {
            let at = self.offset();
            let Tok::Var(i) = self.bump() else {
                return Err(syntax(at, "expected a variable before '->'"));
            };
            self.expect(Tok::Arrow)?;
            let img_at = self.offset();
            let Value::Scalar(g) = self.sum()? else {
                return Err(syntax(img_at, "derivation image must be a field element"));
            };
            if images[i - 1].replace(g).is_some() {
                return Err(syntax(at, format!("t{i} assigned twice")));
            }
            if matches!(self.peek(), Tok::Comma | Tok::Semi) {
                self.bump();
            } else {
                break;
            }
        }
        let n = self.nvars;
        Derivation::new(
            images
                .into_iter()
                .map(|g| g.unwrap_or_else(|| RatFunc::zero(n)))
                .collect(),
        )
    }
}

fn neg(v: Value) -> Value {
    match v {
        Value::Scalar(s) => Value::Scalar(-s),
        Value::Op(o) => Value::Op(OpVal {
            op: o.op.neg(),
            word: o.word.map(|w| word_map(&w, |c| -c)),
        }),
    }
}

fn scale(o: &OpVal, s: &RatFunc) -> OpVal {
    OpVal {
        op: o.op.scale(s),
        word: o.word.as_ref().map(|w| word_map(w, |c| s * c)),
    }
}

/// Parse a field element of `Q(t1..tk)`.
pub fn parse_expr(text: &str, nvars: usize) -> Result<RatFunc> {
    match Parser::new(text, nvars)?.top()? {
        Value::Scalar(s) => Ok(s),
        Value::Op(_) => Err(syntax(0, "expected a field element, found an operator")),
    }
}

/// Parse an operator expression into canonical form. A plain field element
/// `c` denotes multiplication by `c`.
pub fn parse_op(text: &str, nvars: usize) -> Result<DiffOp> {
    Ok(Parser::new(text, nvars)?.top()?.into_op().op)
}

/// Parse a composition word: a sum of field elements times compositions of
/// derivations, kept unnormalized.
pub fn parse_word(text: &str, nvars: usize) -> Result<OpWord> {
    Parser::new(text, nvars)?
        .top()?
        .into_op()
        .word
        .ok_or_else(|| {
            syntax(
                0,
                "not a composition word: a non-constant coefficient sits to the right of 'o'",
            )
        })
}

/// Parse a derivation: `t1 -> g1; t2 -> g2` (unlisted variables map to 0),
/// or any operator expression that normalizes to `sum g_i d_i`.
pub fn parse_derivation(text: &str, nvars: usize) -> Result<Derivation> {
    let op = parse_op(text, nvars)?;
    if op.degree() > 1 || !op.is_in_o0() {
        return Err(syntax(0, format!("{op} is not a derivation")));
    }
    let images = (0..nvars)
        .map(|i| {
            op.coeff(&MultiIndex::var(nvars, i))
                .cloned()
                .unwrap_or_else(|| RatFunc::zero(nvars))
        })
        .collect();
    Derivation::new(images)
}
