//! Structured verification reports.
//!
//! Numbers that must stay exact are carried as integers (big integers when they
//! outgrow `i128`). On the wire, integers that fit in `i64` and all finite floats
//! are JSON numbers; everything else is a decimal string. Floats use the
//! shortest representation that round-trips.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq)]
pub enum Num {
    Int(i128),
    Big(BigInt),
    Real(f64),
}

impl Num {
    pub fn as_f64(&self) -> f64 {
        match self {
            Num::Int(v) => *v as f64,
            Num::Big(v) => v.to_string().parse().unwrap_or(f64::NAN),
            Num::Real(v) => *v,
        }
    }
}

impl From<i128> for Num {
    fn from(v: i128) -> Self {
        Num::Int(v)
    }
}

macro_rules! num_from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Num {
            fn from(v: $t) -> Self { Num::Int(v as i128) }
        }
    )*};
}
num_from_int!(i32, i64, u32, u64, usize);

impl From<u128> for Num {
    fn from(v: u128) -> Self {
        i128::try_from(v).map(Num::Int).unwrap_or_else(|_| Num::Big(BigInt::from(v)))
    }
}

impl From<BigInt> for Num {
    fn from(v: BigInt) -> Self {
        i128::try_from(&v).map(Num::Int).unwrap_or(Num::Big(v))
    }
}

impl From<f64> for Num {
    fn from(v: f64) -> Self {
        Num::Real(v)
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Int(v) => write!(f, "{v}"),
            Num::Big(v) => write!(f, "{v}"),
            Num::Real(v) => write!(f, "{v:?}"),
        }
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Num::Int(v) => match i64::try_from(*v) {
                Ok(small) => ser.serialize_i64(small),
                Err(_) => ser.serialize_str(&v.to_string()),
            },
            Num::Big(v) => ser.serialize_str(&v.to_string()),
            Num::Real(v) if v.is_finite() => ser.serialize_f64(*v),
            Num::Real(v) => ser.serialize_str(&format!("{v}")),
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        struct NumVisitor;
        impl Visitor<'_> for NumVisitor {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num::Int(v as i128))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num::Int(v as i128))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Ok(Num::Real(v))
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Num, E> {
                if let Ok(v) = s.parse::<i128>() {
                    return Ok(Num::Int(v));
                }
                if let Ok(v) = s.parse::<BigInt>() {
                    return Ok(Num::Big(v));
                }
                s.parse::<f64>().map(Num::Real).map_err(|_| E::custom(format!("bad number '{s}'")))
            }
        }
        de.deserialize_any(NumVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "==")]
    Eq,
}

/// Slack allowed in a floating-point assertion: `lhs <= rhs + rel·|rhs| + abs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub const fn rel(rel: f64) -> Self {
        Tolerance { rel, abs: 0.0 }
    }

    pub const fn new(rel: f64, abs: f64) -> Self {
        Tolerance { rel, abs }
    }

    pub fn slack(&self, rhs: f64) -> f64 {
        self.rel * rhs.abs() + self.abs
    }
}

/// Default slack for floating inequalities.
pub const FLOAT_LE: Tolerance = Tolerance::new(1e-9, 1e-9);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub lhs: Num,
    pub rhs: Num,
    pub relation: Relation,
    pub pass: bool,
    /// `None` means the comparison was exact.
    pub tolerance: Option<Tolerance>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub lemma: String,
    pub status: Status,
    pub inputs: BTreeMap<String, serde_json::Value>,
    pub quantities: BTreeMap<String, Num>,
    pub assertions: Vec<Assertion>,
    pub measured_ratios: BTreeMap<String, Num>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub sections: Vec<VerificationReport>,
}

impl VerificationReport {
    pub fn new(lemma: impl Into<String>) -> Self {
        VerificationReport {
            lemma: lemma.into(),
            status: Status::Pass,
            inputs: BTreeMap::new(),
            quantities: BTreeMap::new(),
            assertions: Vec::new(),
            measured_ratios: BTreeMap::new(),
            notes: Vec::new(),
            sections: Vec::new(),
        }
    }

    pub fn not_applicable(lemma: impl Into<String>, why: impl Into<String>) -> Self {
        let mut r = Self::new(lemma);
        r.status = Status::NotApplicable;
        r.notes.push(why.into());
        r
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.inputs.insert(key.to_string(), v);
        self
    }

    pub fn qty(&mut self, key: &str, value: impl Into<Num>) -> &mut Self {
        self.quantities.insert(key.to_string(), value.into());
        self
    }

    pub fn ratio(&mut self, key: &str, value: f64) -> &mut Self {
        self.measured_ratios.insert(key.to_string(), Num::Real(value));
        self
    }

    pub fn note(&mut self, msg: impl Into<String>) -> &mut Self {
        self.notes.push(msg.into());
        self
    }

    fn push(&mut self, a: Assertion) -> bool {
        let pass = a.pass;
        if !pass && self.status != Status::NotApplicable {
            self.status = Status::Fail;
        }
        self.assertions.push(a);
        pass
    }

    /// Exact `lhs <= rhs`.
    pub fn assert_le(&mut self, name: &str, lhs: impl Into<Num>, rhs: impl Into<Num>) -> bool {
        self.exact(name, lhs.into(), rhs.into(), Relation::Le)
    }

    /// Exact `lhs == rhs`.
    pub fn assert_eq(&mut self, name: &str, lhs: impl Into<Num>, rhs: impl Into<Num>) -> bool {
        self.exact(name, lhs.into(), rhs.into(), Relation::Eq)
    }

    pub fn assert_lt(&mut self, name: &str, lhs: impl Into<Num>, rhs: impl Into<Num>) -> bool {
        self.exact(name, lhs.into(), rhs.into(), Relation::Lt)
    }

    fn exact(&mut self, name: &str, lhs: Num, rhs: Num, relation: Relation) -> bool {
        let ord = compare_exact(&lhs, &rhs);
        let pass = match relation {
            Relation::Le => ord.is_le(),
            Relation::Lt => ord.is_lt(),
            Relation::Eq => ord.is_eq(),
        };
        self.push(Assertion { name: name.to_string(), lhs, rhs, relation, pass, tolerance: None })
    }

    /// Boolean fact recorded as `1 == 1` / `0 == 1`.
    pub fn assert_true(&mut self, name: &str, holds: bool) -> bool {
        self.assert_eq(name, holds as i128, 1i128)
    }

    /// Floating `lhs <= rhs` up to `tol`.
    pub fn assert_le_f64(&mut self, name: &str, lhs: f64, rhs: f64, tol: Tolerance) -> bool {
        let pass = lhs <= rhs + tol.slack(rhs);
        self.push(Assertion {
            name: name.to_string(),
            lhs: Num::Real(lhs),
            rhs: Num::Real(rhs),
            relation: Relation::Le,
            pass,
            tolerance: Some(tol),
        })
    }

    /// Floating `lhs == rhs` up to `|lhs − rhs| <= rel·scale + abs`, where
    /// `scale` defaults to `max(|lhs|, |rhs|)`.
    pub fn assert_close(&mut self, name: &str, lhs: f64, rhs: f64, tol: Tolerance) -> bool {
        self.assert_close_scaled(name, lhs, rhs, lhs.abs().max(rhs.abs()), tol)
    }

    pub fn assert_close_scaled(&mut self, name: &str, lhs: f64, rhs: f64, scale: f64, tol: Tolerance) -> bool {
        let pass = (lhs - rhs).abs() <= tol.rel * scale + tol.abs;
        self.push(Assertion {
            name: name.to_string(),
            lhs: Num::Real(lhs),
            rhs: Num::Real(rhs),
            relation: Relation::Eq,
            pass,
            tolerance: Some(tol),
        })
    }

    pub fn section(&mut self, sub: VerificationReport) -> &mut Self {
        if sub.status == Status::Fail && self.status != Status::NotApplicable {
            self.status = Status::Fail;
        }
        self.sections.push(sub);
        self
    }

    /// True unless some assertion, here or in a section, failed.
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn failed_assertions(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_failures(&self.lemma, &mut out);
        out
    }

    fn collect_failures(&self, path: &str, out: &mut Vec<String>) {
        for a in self.assertions.iter().filter(|a| !a.pass) {
            out.push(format!("{path}: {} ({} {:?} {})", a.name, a.lhs, a.relation, a.rhs));
        }
        for s in &self.sections {
            s.collect_failures(&format!("{path}/{}", s.lemma), out);
        }
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn find_section(&self, lemma: &str) -> Option<&VerificationReport> {
        if self.lemma == lemma {
            return Some(self);
        }
        self.sections.iter().find_map(|s| s.find_section(lemma))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn to_big(n: &Num) -> Option<BigInt> {
    match n {
        Num::Int(v) => Some(BigInt::from(*v)),
        Num::Big(v) => Some(v.clone()),
        Num::Real(_) => None,
    }
}

fn compare_exact(a: &Num, b: &Num) -> std::cmp::Ordering {
    match (to_big(a), to_big(b)) {
        (Some(x), Some(y)) => x.cmp(&y),
        _ => a.as_f64().partial_cmp(&b.as_f64()).unwrap_or(std::cmp::Ordering::Greater),
    }
}
