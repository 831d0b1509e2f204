//! State elements.
//!
//! A [`Value`] is a structural, hashable element of a state space. The derived
//! ordering is the canonical ordering used for deterministic output and
//! tie-breaking; it carries no semantic meaning.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite integer interval `lo..hi`, where `lo = hi + 1` encodes an empty
/// interval positioned just before `lo`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(i64, i64)", into = "(i64, i64)")]
pub struct Interval {
    lo: i64,
    hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi.saturating_add(1) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// The empty interval positioned at `lo`, i.e. `lo..lo-1`.
    pub fn empty_at(lo: i64) -> Self {
        Interval { lo, hi: lo - 1 }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    /// Number of integers in the interval.
    pub fn len(&self) -> i64 {
        self.hi - self.lo + 1
    }

    pub fn contains_point(&self, k: i64) -> bool {
        self.lo <= k && k <= self.hi
    }

    /// Bound-wise containment: `other` lies within `self`, so `self.lo <= other.lo`
    /// and `other.hi <= self.hi`. Empty intervals are contained wherever their
    /// position falls inside the bounds.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// `other` lies within `self` and differs from it.
    pub fn strictly_contains(&self, other: &Interval) -> bool {
        self.contains_interval(other) && self != other
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        !self.is_empty() && !other.is_empty() && self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn points(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl TryFrom<(i64, i64)> for Interval {
    type Error = Error;

    fn try_from((lo, hi): (i64, i64)) -> Result<Self> {
        Interval::new(lo, hi)
    }
}

impl From<Interval> for (i64, i64) {
    fn from(iv: Interval) -> Self {
        (iv.lo, iv.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// A state element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Value {
    #[serde(rename = "int")]
    Int(i64),
    #[serde(rename = "pair")]
    Pair(Box<Value>, Box<Value>),
    #[serde(rename = "interval")]
    Interval(Interval),
    #[serde(rename = "iset")]
    IntervalSet(BTreeSet<Interval>),
    #[serde(rename = "seq")]
    Seq(Vec<i64>),
    #[serde(rename = "node")]
    Node(String),
    #[serde(rename = "tuple")]
    Tuple(Vec<Value>),
}

impl Value {
    pub fn int(i: i64) -> Self {
        Value::Int(i)
    }

    pub fn pair(a: Value, b: Value) -> Self {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn int_pair(a: i64, b: i64) -> Self {
        Value::pair(Value::Int(a), Value::Int(b))
    }

    pub fn interval(lo: i64, hi: i64) -> Result<Self> {
        Interval::new(lo, hi).map(Value::Interval)
    }

    pub fn node(id: impl Into<String>) -> Self {
        Value::Node(id.into())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_interval(&self) -> Option<Interval> {
        match self {
            Value::Interval(iv) => Some(*iv),
            _ => None,
        }
    }

    pub fn as_interval_set(&self) -> Option<&BTreeSet<Interval>> {
        match self {
            Value::IntervalSet(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_seq(&self) -> Option<&[i64]> {
        match self {
            Value::Seq(s) => Some(s),
            _ => None,
        }
    }

    /// Both components of an integer pair.
    pub fn as_int_pair(&self) -> Option<(i64, i64)> {
        match self {
            Value::Pair(a, b) => Some((a.as_int()?, b.as_int()?)),
            _ => None,
        }
    }

    /// The `i`-th component of a pair or tuple.
    pub fn component(&self, i: usize) -> Option<&Value> {
        match (self, i) {
            (Value::Pair(a, _), 0) => Some(a),
            (Value::Pair(_, b), 1) => Some(b),
            (Value::Tuple(items), i) => items.get(i),
            _ => None,
        }
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<Interval> for Value {
    fn from(iv: Interval) -> Self {
        Value::Interval(iv)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Pair(a, b) => write!(f, "({a}, {b})"),
            Value::Interval(iv) => write!(f, "{iv}"),
            Value::IntervalSet(s) => {
                f.write_str("{")?;
                for (k, iv) in s.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{iv}")?;
                }
                f.write_str("}")
            }
            Value::Seq(items) => {
                f.write_str("[")?;
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("]")
            }
            Value::Node(id) => f.write_str(id),
            Value::Tuple(items) => {
                f.write_str("<")?;
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(">")
            }
        }
    }
}

impl std::str::FromStr for Value {
    type Err = Error;

    /// Parses the display form (`5`, `1..3`, `(1, 2)`, `{1..2, 4..4}`,
    /// `[3, 1]`, `<[3, 1], 2>`, `a`) or the JSON form.
    fn from_str(s: &str) -> Result<Value> {
        let t = s.trim();
        if t.starts_with("{\"") {
            return serde_json::from_str(t).map_err(|e| Error::MalformedExpr(format!("value {t:?}: {e}")));
        }
        let mut p = TextParser { s: t.as_bytes(), pos: 0 };
        let v = p.value();
        p.skip_ws();
        match v {
            Some(v) if p.pos == p.s.len() => Ok(v),
            _ => Err(Error::MalformedExpr(format!("cannot parse value {t:?}"))),
        }
    }
}

struct TextParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl TextParser<'_> {
    fn skip_ws(&mut self) {
        while self.s.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Option<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.s.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    fn int_or_interval(&mut self) -> Option<Value> {
        let lo = self.int()?;
        if self.s[self.pos..].starts_with(b"..") {
            self.pos += 2;
            let hi = self.int()?;
            return Interval::new(lo, hi).ok().map(Value::Interval);
        }
        Some(Value::Int(lo))
    }

    fn list<T>(&mut self, close: u8, mut item: impl FnMut(&mut Self) -> Option<T>) -> Option<Vec<T>> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Some(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(close) {
                return Some(out);
            }
            if !self.eat(b',') {
                return None;
            }
        }
    }

    fn value(&mut self) -> Option<Value> {
        match self.peek()? {
            b'(' => {
                self.pos += 1;
                let a = self.value()?;
                if !self.eat(b',') {
                    return None;
                }
                let b = self.value()?;
                self.eat(b')').then(|| Value::pair(a, b))
            }
            b'[' => {
                self.pos += 1;
                self.list(b']', Self::int).map(Value::Seq)
            }
            b'<' => {
                self.pos += 1;
                self.list(b'>', Self::value).map(Value::Tuple)
            }
            b'{' => {
                self.pos += 1;
                let items = self.list(b'}', |p| p.int_or_interval()?.as_interval())?;
                Some(Value::IntervalSet(items.into_iter().collect()))
            }
            c if c == b'-' || c.is_ascii_digit() => self.int_or_interval(),
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.s.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
                    self.pos += 1;
                }
                Some(Value::node(std::str::from_utf8(&self.s[start..self.pos]).ok()?))
            }
            _ => None,
        }
    }
}

/// Renders a set of values as `{a, b, c}` in canonical order.
pub fn format_set<'a>(values: impl IntoIterator<Item = &'a Value>) -> String {
    let mut out = String::from("{");
    for (k, v) in values.into_iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        out.push_str(&v.to_string());
    }
    out.push('}');
    out
}
