use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use loopstar::C64;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const SCHEMA: &str = "loopstar-report/1";

/// A float written with 17 significant digits; non-finite values are
/// written as the strings `"NaN"`, `"inf"` and `"-inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_nan() {
            s.serialize_str("NaN")
        } else if x.is_infinite() {
            s.serialize_str(if x > 0.0 { "inf" } else { "-inf" })
        } else {
            let n = serde_json::Number::from_str(&format!("{x:.16e}")).map_err(serde::ser::Error::custom)?;
            n.serialize(s)
        }
    }
}

impl<'a> Deserialize<'a> for Real {
    fn deserialize<D: Deserializer<'a>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Real;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"NaN\", \"inf\", \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v {
                    "NaN" => Ok(Real(f64::NAN)),
                    "inf" => Ok(Real(f64::INFINITY)),
                    "-inf" => Ok(Real(f64::NEG_INFINITY)),
                    other => other.parse().map(Real).map_err(|_| E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
            fn visit_map<A: de::MapAccess<'de>>(self, map: A) -> Result<Real, A::Error> {
                // arbitrary-precision numbers arrive as a single-entry map
                let n = serde_json::Number::deserialize(de::value::MapAccessDeserializer::new(map))?;
                n.as_f64().map(Real).ok_or_else(|| de::Error::custom("number out of range"))
            }
        }
        d.deserialize_any(V)
    }
}

/// `#[serde(with = "real_f64")]` for plain `f64` fields.
pub mod real_f64 {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        Real(*x).serialize(s)
    }

    pub fn deserialize<'a, D: Deserializer<'a>>(d: D) -> Result<f64, D::Error> {
        Real::deserialize(d).map(|r| r.0)
    }
}

pub type Values = BTreeMap<String, Real>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub values: Values,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub values: Values,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Reference>,
    pub residual: Real,
    pub tolerance: Real,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    /// A check passing when `residual ≤ tolerance` (and the residual is a number).
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            values: Values::new(),
            reference: None,
            residual: Real(residual),
            tolerance: Real(tolerance),
            pass: residual <= tolerance,
            flags: Vec::new(),
            error: None,
        }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, tolerance: f64, error: impl fmt::Display) -> Self {
        let mut c = Self::new(name, f64::NAN, tolerance);
        c.error = Some(error.to_string());
        c
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.into(), Real(v));
        self
    }

    pub fn complex(self, key: &str, z: C64) -> Self {
        self.value(&format!("{key}.re"), z.re).value(&format!("{key}.im"), z.im)
    }

    pub fn reference(mut self, source: &str, values: &[(&str, f64)]) -> Self {
        let values = values.iter().map(|(k, v)| (k.to_string(), Real(*v))).collect();
        self.reference = Some(Reference { values, source: source.into() });
        self
    }

    pub fn reference_complex(self, source: &str, key: &str, z: C64) -> Self {
        self.reference(source, &[(&format!("{key}.re"), z.re), (&format!("{key}.im"), z.im)])
    }

    /// Adds `flag` when the check fails.
    pub fn flag_on_failure(mut self, flag: &str) -> Self {
        if !self.pass && !self.flags.iter().any(|f| f == flag) {
            self.flags.push(flag.into());
        }
        self
    }

    /// Further condition that must hold for the check to pass.
    pub fn require(mut self, ok: bool) -> Self {
        self.pass &= ok;
        self
    }
}

/// Informational table; does not affect the pass flag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Real>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, values: &[f64]) {
        self.rows.push(values.iter().copied().map(Real).collect());
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<Table>,
    pub pass: bool,
    pub wall_clock_s: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub config: RunConfig,
    pub suites: Vec<Suite>,
    pub pass: bool,
    pub wall_clock_s: Real,
}

impl Report {
    pub fn new(command: &str, config: RunConfig, suites: Vec<Suite>, wall_clock_s: f64) -> Self {
        let pass = suites.iter().all(|s| s.pass);
        Self { schema: SCHEMA.into(), command: command.into(), config, suites, pass, wall_clock_s: Real(wall_clock_s) }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize") + "\n"
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn suite(&self, name: &str) -> Option<&Suite> {
        self.suites.iter().find(|s| s.name == name)
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            for c in &s.checks {
                let status = if c.pass { "PASS" } else { "FAIL" };
                out += &format!("{status} {}/{} residual={:.3e} tol={:.1e}", s.name, c.name, c.residual.0, c.tolerance.0);
                if let Some(e) = &c.error {
                    out += &format!(" error: {e}");
                }
                if !c.flags.is_empty() {
                    out += &format!(" [{}]", c.flags.join(", "));
                }
                out.push('\n');
            }
        }
        out += &format!("{}: {} ({:.1} s)\n", self.command, if self.pass { "pass" } else { "FAIL" }, self.wall_clock_s.0);
        out
    }
}

/// Removes every `wall_clock_s` field, for comparing reports across runs.
pub fn strip_timing(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(m) => {
            m.remove("wall_clock_s");
            m.values_mut().for_each(strip_timing);
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}
