//! Verdict records. Serialized as JSON; non-finite reals appear as the
//! strings `"inf"`, `"-inf"` and `"nan"`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::hex_digest;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
}

impl Decision {
    pub fn from_accept(ok: bool) -> Self {
        if ok {
            Decision::Accept
        } else {
            Decision::Reject
        }
    }

    pub fn is_accept(self) -> bool {
        self == Decision::Accept
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Accept => "accept",
            Decision::Reject => "reject",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum Reason {
    /// `|ṽ| ≥ 1 − ε`.
    NearConstant,
    /// `p̃² − c̃²` under the gate.
    NormGapSmall,
    NormGapLarge,
    /// Every pivot sample carried one label.
    Monochromatic,
    ThresholdsIntersect,
    ThresholdsDisjoint,
    /// `p̃ < C² ε² / 6`.
    WeakCorrelation,
    /// `p̃ / √(c̃₁² c̃₂²) < 1 − 2ε₁²`.
    AngleTooLarge,
    /// A norm estimate was non-positive, so the ratio is undefined.
    NegativeRadicand,
    ConsistencyPassed,
    RingRejected {
        ring: usize,
    },
    PairInconsistent {
        first: usize,
        second: usize,
    },
    RingUnbalanced {
        ring: usize,
    },
    CenterThreshold,
    AllChecksPassed,
}

pub mod real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a real: {other}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpleDiag {
    pub eps: f64,
    pub delta: f64,
    pub accuracy: f64,
    pub gate: f64,
    pub v: f64,
    pub c2: Option<f64>,
    pub p2: Option<f64>,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivotDiag {
    #[serde(with = "real")]
    pub pivot: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdDiag {
    pub v1: f64,
    pub v2: f64,
    pub eps: f64,
    pub m: u64,
    #[serde(with = "real")]
    pub a1: f64,
    #[serde(with = "real")]
    pub b1: f64,
    #[serde(with = "real")]
    pub a2: f64,
    #[serde(with = "real")]
    pub b2: f64,
}

impl ThresholdDiag {
    /// `[max aᵢ, min bᵢ]`; empty when the bounds cross.
    pub fn overlap(&self) -> (f64, f64) {
        (self.a1.max(self.a2), self.b1.min(self.b2))
    }

    /// A finite point of the overlap (when nonempty).
    pub fn common_point(&self) -> Option<f64> {
        let (lo, hi) = self.overlap();
        if lo > hi {
            return None;
        }
        Some(match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo,
            (false, true) => hi,
            (false, false) => 0.0,
        })
    }

    /// Same record with every threshold divided by `scale`.
    pub fn unscaled(&self, scale: f64) -> Self {
        Self {
            a1: self.a1 / scale,
            b1: self.b1 / scale,
            a2: self.a2 / scale,
            b2: self.b2 / scale,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyDiag {
    pub eps: f64,
    pub delta: f64,
    pub accuracy: f64,
    pub v1: f64,
    pub v2: f64,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub p: Option<f64>,
    pub ratio: Option<f64>,
    pub threshold: Option<ThresholdDiag>,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingDiag {
    pub index: usize,
    #[serde(with = "real")]
    pub lo: f64,
    #[serde(with = "real")]
    pub hi: f64,
    pub count: u64,
    pub active: bool,
    pub scale: Option<f64>,
    pub simple: Option<SimpleDiag>,
    pub simple_decision: Option<Decision>,
    pub balance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDiag {
    pub first: usize,
    pub second: usize,
    pub scale: f64,
    pub decision: Decision,
    pub reason: Reason,
    pub detail: ConsistencyDiag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterDiag {
    pub center_count: u64,
    pub beyond_count: u64,
    pub v_center: f64,
    pub v_beyond: f64,
    pub threshold: ThresholdDiag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiDiag {
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub k: usize,
    pub k_min: usize,
    pub subroutines: usize,
    pub delta_sub: f64,
    pub pivot: PivotDiag,
    pub ring_budget: u64,
    pub total_draws: u64,
    pub center_budget: u64,
    #[serde(with = "real")]
    pub outer_start: f64,
    pub unassigned: u64,
    pub rings: Vec<RingDiag>,
    pub pairs: Vec<PairDiag>,
    pub common_threshold: Option<f64>,
    pub center: Option<CenterDiag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostics {
    Simple(SimpleDiag),
    Pivot(PivotDiag),
    Threshold(ThresholdDiag),
    Consistency(ConsistencyDiag),
    Ri(Box<RiDiag>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TesterVerdict {
    pub schema: u32,
    pub decision: Decision,
    pub reason: Reason,
    pub samples_used: u64,
    pub diagnostics: Diagnostics,
}

impl TesterVerdict {
    pub fn new(
        decision: Decision,
        reason: Reason,
        samples_used: u64,
        diagnostics: Diagnostics,
    ) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            decision,
            reason,
            samples_used,
            diagnostics,
        }
    }

    pub fn accepted(&self) -> bool {
        self.decision.is_accept()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| crate::Error::Config(e.to_string()))
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| crate::Error::Config(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| crate::Error::Config(e.to_string()))
    }

    /// First 16 hex digits of the SHA-256 of the serialized diagnostics.
    pub fn digest(&self) -> Result<String> {
        let body = serde_json::to_vec(&self.diagnostics)
            .map_err(|e| crate::Error::Config(e.to_string()))?;
        Ok(hex_digest(&body, 16))
    }
}
