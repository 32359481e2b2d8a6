//! Textual parameter values. Every type prints in a form its parser accepts.

use std::fmt;
use std::str::FromStr;

use loewner_core::stochastic::{Log, Observable, Power};
use loewner_core::Complex64;
use serde::{Serialize, Serializer};

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("not a number: {s:?}"))
}

macro_rules! serialize_via_display {
    ($($t:ty),*) => {$(
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
    )*};
}

/// `re:im` or a bare real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexArg(pub Complex64);

impl FromStr for ComplexArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (re, im) = match s.split_once(':') {
            Some((a, b)) => (parse_f64(a)?, parse_f64(b)?),
            None => (parse_f64(s)?, 0.0),
        };
        Ok(Self(Complex64::new(re, im)))
    }
}

impl fmt::Display for ComplexArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.0.re, self.0.im)
    }
}

/// Comma-separated complex values.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexList(pub Vec<Complex64>);

impl FromStr for ComplexList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim().is_empty() {
            return Ok(Self(Vec::new()));
        }
        s.split(',').map(|x| x.parse::<ComplexArg>().map(|c| c.0)).collect::<Result<_, _>>().map(Self)
    }
}

impl fmt::Display for ComplexList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| ComplexArg(*c).to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Real function of time: `const:a`, `linear:a:b` (a + bt) or `sin:a:w` (a sin wt).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeFunction {
    Const(f64),
    Linear(f64, f64),
    Sin(f64, f64),
}

impl TimeFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Self::Const(a) => a,
            Self::Linear(a, b) => a + b * t,
            Self::Sin(a, w) => a * (w * t).sin(),
        }
    }
}

impl FromStr for TimeFunction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["const", a] => Ok(Self::Const(parse_f64(a)?)),
            ["linear", a, b] => Ok(Self::Linear(parse_f64(a)?, parse_f64(b)?)),
            ["sin", a, w] => Ok(Self::Sin(parse_f64(a)?, parse_f64(w)?)),
            _ => Err(format!("expected const:a, linear:a:b or sin:a:w, got {s:?}")),
        }
    }
}

impl fmt::Display for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Const(a) => write!(f, "const:{a}"),
            Self::Linear(a, b) => write!(f, "linear:{a}:{b}"),
            Self::Sin(a, w) => write!(f, "sin:{a}:{w}"),
        }
    }
}

/// `power:a`, `log`, or `martingale` for `z^{1−4/κ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservableArg {
    Power(f64),
    Log,
    Martingale,
}

impl ObservableArg {
    pub fn build(&self, kappa: f64) -> Box<dyn Observable> {
        match *self {
            Self::Power(a) => Box::new(Power(a)),
            Self::Log => Box::new(Log),
            Self::Martingale => Box::new(Power(1.0 - 4.0 / kappa)),
        }
    }
}

impl FromStr for ObservableArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            Some(("power", a)) => Ok(Self::Power(parse_f64(a)?)),
            None if s == "log" => Ok(Self::Log),
            None if s == "martingale" => Ok(Self::Martingale),
            _ => Err(format!("expected power:a, log or martingale, got {s:?}")),
        }
    }
}

impl fmt::Display for ObservableArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power(a) => write!(f, "power:{a}"),
            Self::Log => f.write_str("log"),
            Self::Martingale => f.write_str("martingale"),
        }
    }
}

serialize_via_display!(ComplexArg, ComplexList, TimeFunction, ObservableArg);
