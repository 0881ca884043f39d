use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Tc,
    Sla,
    Mer,
    AicGm,
    AicLm,
    CwtTc,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Tc => "TC",
            Method::Sla => "SLA",
            Method::Mer => "MER",
            Method::AicGm => "AIC_GM",
            Method::AicLm => "AIC_LM",
            Method::CwtTc => "CWT_TC",
        };
        f.write_str(s)
    }
}

/// A picked time of arrival. `index`/`time` are `None` when nothing was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToaEstimate {
    pub method: Method,
    pub index: Option<usize>,
    pub time: Option<f64>,
    pub params: BTreeMap<String, f64>,
    /// Analysis frequency (CWT picks only).
    pub frequency: Option<f64>,
    /// Set when the pick falls inside the cone of influence.
    pub in_coi: bool,
    /// Free-form diagnostic, e.g. why nothing was found.
    pub note: Option<String>,
}

impl ToaEstimate {
    pub fn found(method: Method, index: usize, time: f64) -> Self {
        Self {
            method,
            index: Some(index),
            time: Some(time),
            params: BTreeMap::new(),
            frequency: None,
            in_coi: false,
            note: None,
        }
    }

    pub fn not_found(method: Method) -> Self {
        Self {
            method,
            index: None,
            time: None,
            params: BTreeMap::new(),
            frequency: None,
            in_coi: false,
            note: None,
        }
    }

    pub fn is_found(&self) -> bool {
        self.time.is_some()
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Earliest index of the maximum (NaN entries are skipped).
pub(crate) fn argmax_first(xs: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &x) in xs.iter().enumerate() {
        if x.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if x <= b => {}
            _ => best = Some((i, x)),
        }
    }
    best.map(|(i, _)| i)
}

/// Earliest index of the minimum (NaN entries are skipped).
pub(crate) fn argmin_first(xs: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &x) in xs.iter().enumerate() {
        if x.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if x >= b => {}
            _ => best = Some((i, x)),
        }
    }
    best.map(|(i, _)| i)
}

/// Round half away from zero, as used for window lengths derived from α/β products.
pub fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor().max(0.0) as usize
}
